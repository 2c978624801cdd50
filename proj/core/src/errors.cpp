#include "mlnn/errors.hpp"

#include <fmt/format.h>

namespace mlnn {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

}  // namespace mlnn
