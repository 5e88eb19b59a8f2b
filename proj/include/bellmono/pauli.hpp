#pragma once

#include <array>
#include <complex>
#include <string_view>

namespace bellmono {

enum class PauliAxis { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<PauliAxis, 3> kPauliAxes{PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

// Action of a single Pauli matrix on a computational basis bit:
// sigma |bit> = phase |bit ^ flip>.
struct PauliAction {
    bool flip;
    std::complex<double> phase;
};

constexpr PauliAction pauli_action(PauliAxis axis, unsigned bit) noexcept {
    switch (axis) {
        case PauliAxis::X:
            return {true, {1.0, 0.0}};
        case PauliAxis::Y:
            return {true, bit == 0 ? std::complex<double>{0.0, 1.0} : std::complex<double>{0.0, -1.0}};
        case PauliAxis::Z:
        default:
            return {false, bit == 0 ? std::complex<double>{1.0, 0.0} : std::complex<double>{-1.0, 0.0}};
    }
}

constexpr std::string_view axis_name(PauliAxis axis) noexcept {
    switch (axis) {
        case PauliAxis::X: return "x";
        case PauliAxis::Y: return "y";
        case PauliAxis::Z:
        default: return "z";
    }
}

}  // namespace bellmono
