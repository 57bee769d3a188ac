#pragma once

#include <string>

#include "invertkit/interval.hpp"

#include "json.hpp"

namespace invertkit {

// {resolution, model, R, P, accepted, rejected, boundary} with each box
// as [[lo,hi],...]. Doubles print in shortest round-trip form, so dumping
// and reloading reproduces every bound bit for bit.
nlohmann::ordered_json paving_to_json(const Paving& paving);
Paving paving_from_json(const nlohmann::json& j);

void save_paving_json(const Paving& paving, const std::string& path);
Paving load_paving_json(const std::string& path);

// One box per row: lo0,hi0,...,class with class in
// {accepted, rejected, boundary}; accepted rows first.
std::string paving_to_csv(const Paving& paving);
void save_paving_csv(const Paving& paving, const std::string& path);

}  // namespace invertkit
