#ifndef BLAB_BOUNDARY_JSON_HPP
#define BLAB_BOUNDARY_JSON_HPP

#include "blab/boundary.hpp"

#include <json.hpp>

namespace blab {

/// {"kind":"circle","R":1} | {"kind":"ellipse","a":2,"b":1} |
/// {"kind":"fourier","r0":1,"cos":[...],"sin":[...]} with coefficient index m starting at 1.
nlohmann::json descriptor_to_json(const Descriptor& descriptor);

/// Throws InvalidDescriptor on unknown kinds or missing/mistyped fields.
Descriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace blab

#endif  // BLAB_BOUNDARY_JSON_HPP
