#include "wavebench/error.hpp"

namespace wavebench {

NumericalBlowupError::NumericalBlowupError(std::int64_t step)
    : Error("non-finite value in wavefield at step " + std::to_string(step)),
      step_(step) {}

}  // namespace wavebench
