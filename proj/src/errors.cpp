#include "knds/errors.hpp"

#include <utility>

namespace knds {

ReconstructionError::ReconstructionError(std::string stage, const std::string& message)
    : Error(stage + ": " + message), stage_(std::move(stage)) {}

}  // namespace knds
