#pragma once

#include <iosfwd>
#include <string>

#include "peerlab/netcore.hpp"

namespace peerlab::tools {

// Numeric CSV with a header row. A leading "node" column, if present, must
// list 0..n-1 in order and is dropped.
Matrix read_covariates_csv(std::istream& in);
Matrix read_covariates_csv_file(const std::string& path);

}  // namespace peerlab::tools
