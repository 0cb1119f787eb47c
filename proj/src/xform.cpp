#include "bt/xform.hpp"

namespace bt {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::upper_bound: return "upper_bound";
    case TransformKind::logistic: return "logistic";
  }
  return "identity";
}

TransformKind parse_transform_kind(const std::string& s) {
  if (s == "identity") return TransformKind::identity;
  if (s == "upper_bound" || s == "upper") return TransformKind::upper_bound;
  if (s == "logistic") return TransformKind::logistic;
  throw config_error("xform", "unknown transform kind '" + s + "'");
}

}  // namespace bt
