#include "blab/boundary_json.hpp"

#include "blab/error.hpp"

#include <string>

namespace blab {

namespace {

double number_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw InvalidDescriptor(std::string("boundary: missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

std::vector<double> coefficient_list(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return {};
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw InvalidDescriptor(std::string("boundary: '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw InvalidDescriptor(std::string("boundary: '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

nlohmann::json descriptor_to_json(const Descriptor& descriptor) {
    nlohmann::json j;
    if (const auto* c = std::get_if<Circle>(&descriptor)) {
        j["kind"] = "circle";
        j["R"] = c->R;
    } else if (const auto* e = std::get_if<Ellipse>(&descriptor)) {
        j["kind"] = "ellipse";
        j["a"] = e->a;
        j["b"] = e->b;
    } else {
        const auto& f = std::get<Fourier>(descriptor);
        j["kind"] = "fourier";
        j["r0"] = f.r0;
        j["cos"] = f.cos_coeffs;
        j["sin"] = f.sin_coeffs;
    }
    return j;
}

Descriptor descriptor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw InvalidDescriptor("boundary: expected an object with a string 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "circle") return Circle{number_field(j, "R")};
    if (kind == "ellipse") return Ellipse{number_field(j, "a"), number_field(j, "b")};
    if (kind == "fourier")
        return Fourier{number_field(j, "r0"), coefficient_list(j, "cos"), coefficient_list(j, "sin")};
    throw InvalidDescriptor("boundary: unknown kind '" + kind + "'");
}

}  // namespace blab
