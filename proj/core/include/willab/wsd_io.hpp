#pragma once

#include "willab/nullcurve.hpp"

#include <iosfwd>
#include <string>

namespace willab {

// Surface data file (.wsd): UTF-8 text, canonical field order, coefficients
// as decimal pairs with 17 significant digits (doubles round-trip exactly).
// Readers reject unknown format versions.
void write_wsd(std::ostream& os, const NullCurveData& data);
void write_wsd_file(const std::string& path, const NullCurveData& data);

NullCurveData read_wsd(std::istream& is);
NullCurveData read_wsd_file(const std::string& path);

} // namespace willab
