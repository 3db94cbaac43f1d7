#pragma once

#include <concepts>
#include <string>

namespace oriole::csv {

/// Locale-independent number formatting: 17 significant digits, general form.
std::string fmt(double v);

template <std::integral T>
std::string fmt(T v) {
    return std::to_string(v);
}

}  // namespace oriole::csv
