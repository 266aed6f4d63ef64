#pragma once

#include <string>

#include "sbvp/config.hpp"
#include "sbvp/model.hpp"
#include "sbvp/registry.hpp"

namespace sbvp::test {

inline ProblemSpec make_spec(BoundaryKind kind, double p, const std::string& B, const std::string& f,
                             const std::string& delta) {
  ProblemConfig c;
  c.p = p;
  c.boundary = kind;
  c.B = B;
  c.f = f;
  c.delta = delta;
  return build_spec(c);
}

}  // namespace sbvp::test
