#pragma once

#include "nvstirap/core.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace nvstirap::units {

enum class Dimension {
    Dimensionless,
    Length,
    Area,
    Volume,
    Energy,
    Power,
    Temperature,
    Time,
    Mass,
    AngularFrequency,
    Voltage,
    Density, ///< number density, m^-3
    DipoleMoment,
};

struct Suffix {
    std::string_view text;
    Dimension dim;
    double scale;
};

// Longest suffixes first so that e.g. "meV" is not read as "m" + junk.
inline constexpr std::array<Suffix, 33> suffixes{{
    {"e*angstrom", Dimension::DipoleMoment, si::e_charge * 1e-10},
    {"rad/s", Dimension::AngularFrequency, 1.0},
    {"Grad/s", Dimension::AngularFrequency, 1e9},
    {"Mrad/s", Dimension::AngularFrequency, 1e6},
    {"cm-3", Dimension::Density, 1e6},
    {"nm2", Dimension::Area, 1e-18},
    {"nm3", Dimension::Volume, 1e-27},
    {"um2", Dimension::Area, 1e-12},
    {"m-3", Dimension::Density, 1.0},
    {"meV", Dimension::Energy, 1e-3 * si::eV},
    {"ueV", Dimension::Energy, 1e-6 * si::eV},
    {"eV", Dimension::Energy, si::eV},
    {"mW", Dimension::Power, 1e-3},
    {"uW", Dimension::Power, 1e-6},
    {"me", Dimension::Mass, si::m_e},
    {"mK", Dimension::Temperature, 1e-3},
    {"mV", Dimension::Voltage, 1e-3},
    {"um", Dimension::Length, 1e-6},
    {"nm", Dimension::Length, 1e-9},
    {"mm", Dimension::Length, 1e-3},
    {"ms", Dimension::Time, 1e-3},
    {"us", Dimension::Time, 1e-6},
    {"ns", Dimension::Time, 1e-9},
    {"ps", Dimension::Time, 1e-12},
    {"kg", Dimension::Mass, 1.0},
    {"m2", Dimension::Area, 1.0},
    {"m3", Dimension::Volume, 1.0},
    {"J", Dimension::Energy, 1.0},
    {"W", Dimension::Power, 1.0},
    {"K", Dimension::Temperature, 1.0},
    {"V", Dimension::Voltage, 1.0},
    {"s", Dimension::Time, 1.0},
    {"m", Dimension::Length, 1.0},
}};

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view text)
{
    text = trim(text);
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    if (!text.empty() && *begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError("not a number: '" + std::string(text) + "'");
    return value;
}

/// Exponent k when scale is exactly 10^k, for k in [-24, 24].
inline std::optional<int> decimal_exponent(double scale)
{
    for (int k = -24; k <= 24; ++k)
        if (std::stod("1e" + std::to_string(k)) == scale)
            return k;
    return std::nullopt;
}

/// Applies a unit scale. Powers of ten are folded into the decimal exponent
/// before conversion, so "0.1um" and "1e-7" give the same double.
inline double apply_scale(std::string_view number, double scale)
{
    const auto k = decimal_exponent(scale);
    if (!k)
        return parse_number(number) * scale;
    number = trim(number);
    std::string mantissa(number);
    int exponent = 0;
    if (const auto e = number.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = std::string(number.substr(0, e));
        exponent = int(std::lround(parse_number(number.substr(e + 1))));
        if (double(exponent) != parse_number(number.substr(e + 1)))
            throw ConfigError("not a number: '" + std::string(number) + "'");
    }
    parse_number(mantissa); // validates the mantissa on its own
    return parse_number(mantissa + "e" + std::to_string(exponent + *k));
}

/// Parses "<number>[suffix]" into SI. A bare number is taken as SI already.
/// A suffix whose dimension differs from `expected` is rejected.
inline double parse_quantity(std::string_view text, Dimension expected)
{
    text = trim(text);
    for (const auto& sfx : suffixes) {
        if (text.size() <= sfx.text.size())
            continue;
        if (text.substr(text.size() - sfx.text.size()) != sfx.text)
            continue;
        const auto number = trim(text.substr(0, text.size() - sfx.text.size()));
        // "1e-3m" style numbers end in a digit; reject things like "5em"
        if (number.empty() || !(std::isdigit(static_cast<unsigned char>(number.back())) ||
                                number.back() == '.'))
            continue;
        if (sfx.dim != expected)
            throw ConfigError("unit '" + std::string(sfx.text) +
                              "' has the wrong dimension for this key");
        return apply_scale(number, sfx.scale);
    }
    if (expected == Dimension::Dimensionless && text.size() > 3 &&
        text.substr(text.size() - 3) == "ppb")
        return parse_number(text.substr(0, text.size() - 3));
    return parse_number(text);
}

} // namespace nvstirap::units
