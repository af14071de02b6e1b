#pragma once

#include "lops/rational.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lops {

using Json = nlohmann::ordered_json;

/// One pass/fail item of a report, tagged with the label of the identity it checks.
struct CheckItem {
  std::string name;
  std::string anchor;
  bool pass = false;
  Json detail = Json::object();
};

struct Report {
  std::string title;
  std::vector<CheckItem> checks;
  Json summary = Json::object();

  bool pass() const;
  CheckItem& add(std::string name, std::string anchor, bool pass, Json detail = Json::object());
  const CheckItem* find(const std::string& name) const;
  Json to_json() const;
  /// One "PASS name" / "FAIL name" line per check.
  std::string to_text() const;
};

inline std::string q_str(const Rational& r) { return to_string(r); }

/// Fixed-format double so reports are byte-stable.
std::string num_str(double x, int digits = 6);

}  // namespace lops
