#include "invertkit/paving_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace invertkit {

namespace {

nlohmann::ordered_json box_to_json(const Box& box) {
  nlohmann::ordered_json axes = nlohmann::ordered_json::array();
  for (const Interval& ax : box.axes()) {
    axes.push_back(nlohmann::ordered_json::array({ax.lo(), ax.hi()}));
  }
  return axes;
}

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("box must be a non-empty array of [lo, hi]");
  }
  std::vector<Interval> axes;
  axes.reserve(j.size());
  for (const auto& ax : j) {
    if (!ax.is_array() || ax.size() != 2 || !ax[0].is_number() ||
        !ax[1].is_number()) {
      throw std::invalid_argument("box axis must be a [lo, hi] number pair");
    }
    axes.emplace_back(ax[0].get<double>(), ax[1].get<double>());
  }
  return Box(std::move(axes));
}

nlohmann::ordered_json box_list_to_json(const std::vector<Box>& boxes) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const Box& b : boxes) list.push_back(box_to_json(b));
  return list;
}

std::vector<Box> box_list_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("box list must be an array");
  std::vector<Box> boxes;
  boxes.reserve(j.size());
  for (const auto& b : j) boxes.push_back(box_from_json(b));
  return boxes;
}

std::string append_double(std::string s, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  s.append(buf, res.ptr);
  return s;
}

}  // namespace

nlohmann::ordered_json paving_to_json(const Paving& paving) {
  nlohmann::ordered_json j;
  j["resolution"] = paving.resolution;
  j["model"] = paving.model;
  j["R"] = box_to_json(paving.domain);
  j["P"] = box_to_json(paving.performance);
  j["accepted"] = box_list_to_json(paving.accepted);
  j["rejected"] = box_list_to_json(paving.rejected);
  j["boundary"] = box_list_to_json(paving.boundary);
  return j;
}

Paving paving_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("paving must be an object");
  for (const char* key :
       {"resolution", "model", "R", "P", "accepted", "rejected", "boundary"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("paving is missing '") + key +
                                  "'");
    }
  }
  Paving paving;
  if (!j["resolution"].is_number()) {
    throw std::invalid_argument("resolution must be a number");
  }
  paving.resolution = j["resolution"].get<double>();
  if (!j["model"].is_array()) {
    throw std::invalid_argument("model must be an array of strings");
  }
  for (const auto& m : j["model"]) {
    if (!m.is_string()) {
      throw std::invalid_argument("model must be an array of strings");
    }
    paving.model.push_back(m.get<std::string>());
  }
  paving.domain = box_from_json(j["R"]);
  paving.performance = box_from_json(j["P"]);
  paving.accepted = box_list_from_json(j["accepted"]);
  paving.rejected = box_list_from_json(j["rejected"]);
  paving.boundary = box_list_from_json(j["boundary"]);
  return paving;
}

void save_paving_json(const Paving& paving, const std::string& path) {
  const std::string text = paving_to_json(paving).dump(2);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Paving load_paving_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return paving_from_json(j);
}

std::string paving_to_csv(const Paving& paving) {
  const std::size_t dim = paving.domain.dim();
  std::string text;
  for (std::size_t a = 0; a < dim; ++a) {
    if (a) text += ',';
    text += "lo" + std::to_string(a) + ",hi" + std::to_string(a);
  }
  text += ",class\n";

  const auto emit = [&](const std::vector<Box>& boxes, const char* label) {
    for (const Box& b : boxes) {
      for (std::size_t a = 0; a < dim; ++a) {
        if (a) text += ',';
        text = append_double(std::move(text), b.axis(a).lo());
        text += ',';
        text = append_double(std::move(text), b.axis(a).hi());
      }
      text += ',';
      text += label;
      text += '\n';
    }
  };
  emit(paving.accepted, "accepted");
  emit(paving.rejected, "rejected");
  emit(paving.boundary, "boundary");
  return text;
}

void save_paving_csv(const Paving& paving, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << paving_to_csv(paving);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace invertkit
