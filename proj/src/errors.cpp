#include "sbvp/errors.hpp"

#include <fmt/format.h>

namespace sbvp {

Error::Error(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

NoContraction::NoContraction(double bound, double threshold)
    : Error("no_contraction",
            fmt::format("contraction bound {:.6g} exceeds threshold {:.6g}; eps too large", bound,
                        threshold)),
      bound_(bound) {}

MaxIterExceeded::MaxIterExceeded(int iterations, double last_update)
    : Error("max_iter_exceeded",
            fmt::format("Picard iteration did not converge in {} iterations (last update {:.3e})",
                        iterations, last_update)) {}

}  // namespace sbvp
