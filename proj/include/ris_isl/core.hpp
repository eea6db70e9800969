#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ris_isl {

inline constexpr double speed_of_light_m_s = 2.99792458e8;
inline constexpr double boltzmann_J_K = 1.380649e-23;
inline constexpr double pi = std::numbers::pi;

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class invalid_argument_error : public error {
public:
    using error::error;
};

/// Scenario document could not be parsed or failed validation.
class config_error : public error {
public:
    using error::error;
};

/// A numerical routine (quadrature, root finding, overflow guard) failed.
class numeric_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

inline void check_positive(double value, std::string_view what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw invalid_argument_error(std::string(what) + " must be positive and finite, got " +
                                     std::to_string(value));
    }
}

inline void check_non_negative(double value, std::string_view what) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw invalid_argument_error(std::string(what) + " must be non-negative and finite, got " +
                                     std::to_string(value));
    }
}

// Non-fatal diagnostics (CLT regime, unreliable MC tails, ...). The default
// handler writes to stderr; tests and the CLI may redirect it.
using warning_handler = std::function<void(std::string_view)>;

namespace detail {
inline warning_handler& warning_slot() {
    static warning_handler handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}
inline std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

inline warning_handler set_warning_handler(warning_handler handler) {
    std::lock_guard lock(detail::warning_mutex());
    auto previous = std::move(detail::warning_slot());
    detail::warning_slot() = std::move(handler);
    return previous;
}

inline void warn(std::string_view message) {
    std::lock_guard lock(detail::warning_mutex());
    if (detail::warning_slot()) detail::warning_slot()(message);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// x * 10^(db/10) evaluated without forming 10^(db/10) on its own, so that
/// huge SNR knobs times tiny channel powers stay representable.
inline double scale_by_db(double x, double db) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(10.0, db / 10.0 + std::log10(std::abs(x))), x);
}

}  // namespace ris_isl
