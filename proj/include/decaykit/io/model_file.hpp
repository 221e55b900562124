// model_file.hpp - plain-text model and table readers
//
//   dim D                 total dimension (subspace size for continuum models)
//   subspace i1 i2 ...    0-based basis indices spanning P
//   i j re im             one line per nonzero upper-triangle entry (i <= j)
//   continuum emin        optional: replaces the discrete Q block
//   flat gamma cutoff     one coupling line per subspace state, or
//   tabulated path        two-column (E, g) file, relative to the model file
//
// `#` starts a comment.

#pragma once

#include "decaykit/model.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace decaykit::io {

FiniteLevelModel parse_model(std::istream& in, const std::string& base_dir = ".");
FiniteLevelModel load_model(const std::string& path);

// Two numeric columns separated by whitespace or a comma.
std::pair<std::vector<double>, std::vector<double>> load_two_columns(const std::string& path);

} // namespace decaykit::io
