#include "fpdwalk/errors.hpp"

#include <sstream>

namespace fpdwalk {

namespace {

std::string summarize(const std::vector<EnsembleError::Failure>& failures) {
  std::ostringstream os;
  os << failures.size() << " path(s) failed";
  if (!failures.empty())
    os << "; first: path " << failures.front().first << ": " << failures.front().second;
  return os.str();
}

} // namespace

EnsembleError::EnsembleError(std::vector<Failure> failures)
    : std::runtime_error(summarize(failures)), failures_(std::move(failures)) {}

} // namespace fpdwalk
