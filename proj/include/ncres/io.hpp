#pragma once

// JSON forms of matrices, differential forms, chains and windows.

#include <json.hpp>

#include "ncres/forms.hpp"
#include "ncres/parser.hpp"

namespace ncres {

using Json = nlohmann::ordered_json;

inline Json window_json(const TruncationWindow& w) {
  auto side = [](const std::vector<Exp>& v) {
    Json a = Json::array();
    for (Exp e : v) a.push_back(is_neg_inf(e) ? Json("-inf") : Json(e));
    return a;
  };
  return Json{{"floor_y", side(w.y)}, {"floor_d", side(w.d)}};
}

// {"size": r | "inf", "entries": [[i, j, "<expr>"], ...]}
inline MatrixOperator matrix_from_json(const Json& j, const EvalConfig& cfg) {
  if (!j.is_object() || !j.contains("entries")) throw ShapeError("matrix JSON needs an \"entries\" array");
  std::optional<std::size_t> size;
  if (j.contains("size")) {
    const Json& s = j["size"];
    if (s.is_string() && s.get<std::string>() == "inf") {
      size = std::nullopt;
    } else if (s.is_number_integer() && s.get<long>() > 0) {
      size = s.get<std::size_t>();
    } else {
      throw ShapeError("\"size\" must be a positive integer or \"inf\"");
    }
  }
  MatrixOperator m(cfg.n, cfg.mode, size);
  for (const Json& e : j["entries"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned() ||
        !e[2].is_string())
      throw ShapeError("matrix entries are [row, col, \"expr\"]");
    m.accumulate(e[0].get<std::size_t>(), e[1].get<std::size_t>(), parse_operator(e[2].get<std::string>(), cfg));
  }
  return m;
}

inline Json matrix_json(const MatrixOperator& m) {
  Json entries = Json::array();
  for (const auto& [ij, e] : m.entries()) entries.push_back(Json::array({ij.first, ij.second, to_string(e)}));
  return Json{{"size", m.declared_size() ? Json(*m.declared_size()) : Json("inf")}, {"entries", entries}};
}

namespace detail {

inline void form_key_json(Json& o, const FormKey& k) {
  const std::size_t n = k.z.size();
  Json I = Json::array(), J = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (k.mask >> i & 1u) I.push_back(i + 1);
    if (k.mask >> (n + i) & 1u) J.push_back(i + 1);
  }
  o["I"] = I;
  o["J"] = J;
  o["poly"] = Json{{"z", k.z}, {"zbar", k.zbar}};
}

}  // namespace detail

// {"forms":[{"I":[dz indices],"J":[dzbar indices],"poly":{"z":[..],"zbar":[..]},"value":"p/q"}]}
inline Json form_json(const ScalarForm& f) {
  Json forms = Json::array();
  for (const auto& [k, c] : f.terms()) {
    Json o;
    detail::form_key_json(o, k);
    o["value"] = to_string(c);
    forms.push_back(o);
  }
  return Json{{"forms", forms}};
}

inline Json form_operator_json(const FormOperator& f) {
  Json comps = Json::array();
  for (const auto& [k, m] : f.components()) {
    Json o;
    detail::form_key_json(o, k);
    o["matrix"] = matrix_json(m);
    comps.push_back(o);
  }
  return Json{{"components", comps}};
}

// 0-form constants print as plain rationals, everything else as JSON.
inline std::string render_form(const ScalarForm& f) {
  if (f.is_zero()) return "0";
  if (f.is_constant()) return to_string(f.constant_value());
  return form_json(f).dump();
}

inline Json entry_json(const OperatorElement& e) { return to_string(e); }
inline Json entry_json(const MatrixOperator& m) { return matrix_json(m); }
inline Json entry_json(const FormOperator& f) { return form_operator_json(f); }

template <class Alg>
Json chain_json(const Alg& alg, const Chain<typename Alg::Elem>& c) {
  Json words = Json::array();
  for (const auto& [w, coef] : c.words) {
    Json entries = Json::array();
    for (const auto& e : w) entries.push_back(entry_json(e));
    words.push_back(Json{{"coeff", to_string(coef)}, {"entries", entries}});
  }
  return Json{{"kind", kind_name(c.kind)}, {"degree", chain_degree(alg, c)}, {"words", words}};
}

}  // namespace ncres
