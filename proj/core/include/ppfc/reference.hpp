#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ppfc/matcore.hpp"
#include "ppfc/time_expr.hpp"

namespace ppfc {

/// Reference trajectory y*(t), one analytic expression per output channel.
class ReferenceFamily {
 public:
  ReferenceFamily() = default;
  explicit ReferenceFamily(std::vector<TimeExpr> channels, int max_order = 3);

  static ReferenceFamily parse(const std::vector<std::string>& channels, int max_order = 3);
  static ReferenceFamily constant(std::size_t n, double value = 0.0);

  std::size_t channels() const noexcept { return channels_.size(); }
  int max_order() const noexcept { return max_order_; }
  const std::vector<TimeExpr>& expressions() const noexcept { return channels_; }

 private:
  friend Vec eval_ref(const ReferenceFamily&, double, int);
  std::vector<TimeExpr> channels_;
  int max_order_ = 3;
};

/// y*^(order)(t); throws ValidationError for order outside [0, max_order].
Vec eval_ref(const ReferenceFamily& family, double t, int order = 0);

}  // namespace ppfc
