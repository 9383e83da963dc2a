#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cellqos/cli.hpp"

namespace cellqos::cli::detail {

using nlohmann::json;

// A JSON object whose keys must all be consumed; leftovers are typos.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }

  const json* find(std::string_view key) {
    const auto it = node_.find(std::string(key));
    if (it == node_.end()) return nullptr;
    seen_.insert(std::string(key));
    return &*it;
  }

  Section section(std::string_view key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Section(v ? *v : empty, child_path(key));
  }

  void number(std::string_view key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(child_path(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(child_path(key), "must be finite");
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(child_path(key), "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto s = v->get<std::int64_t>();
        if (s < 0) throw ConfigError(child_path(key), "must be >= 0");
        out = static_cast<Int>(s);
      }
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(child_path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(std::string_view key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(child_path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(child_path(key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace cellqos::cli::detail
