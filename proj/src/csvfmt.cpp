#include "oriole/csvfmt.hpp"

#include <charconv>
#include <system_error>

#include "oriole/errors.hpp"

namespace oriole::csv {

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw NumericError("csv: cannot format value");
    return std::string(buf, ptr);
}

}  // namespace oriole::csv
