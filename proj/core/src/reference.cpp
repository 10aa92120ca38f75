#include "ppfc/reference.hpp"

#include "ppfc/errors.hpp"

namespace ppfc {

ReferenceFamily::ReferenceFamily(std::vector<TimeExpr> channels, int max_order)
    : channels_(std::move(channels)), max_order_(max_order) {
  if (channels_.empty()) throw ValidationError("reference: at least one channel required");
  if (max_order_ < 0) throw ValidationError("reference: negative max order");
}

ReferenceFamily ReferenceFamily::parse(const std::vector<std::string>& channels, int max_order) {
  return ReferenceFamily(parse_exprs(channels), max_order);
}

ReferenceFamily ReferenceFamily::constant(std::size_t n, double value) {
  return ReferenceFamily(std::vector<TimeExpr>(n, TimeExpr(value)));
}

Vec eval_ref(const ReferenceFamily& family, double t, int order) {
  if (order < 0 || order > family.max_order_) {
    throw ValidationError("reference: unsupported derivative order " + std::to_string(order));
  }
  return eval_exprs(family.channels_, t, order);
}

}  // namespace ppfc
