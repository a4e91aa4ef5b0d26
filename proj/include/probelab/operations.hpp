#pragma once

// Operation sequences and their JSONL trace format, one operation per line:
//
//   {"op":"insert","a":0,"b":5}   {"op":"delete","a":0,"b":5}   {"op":"query"}
//   {"op":"bps_update","j":[...],"v":[...]}   {"op":"bps_query","j":[...]}
//
// Indices j are 1-based. Answers are written as {"query_index":k,"answer":v}.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "json.hpp"

namespace probelab {

struct insert_op {
  std::uint64_t a = 0, b = 0;
  friend bool operator==(const insert_op&, const insert_op&) = default;
};
struct delete_op {
  std::uint64_t a = 0, b = 0;
  friend bool operator==(const delete_op&, const delete_op&) = default;
};
struct query_op {
  friend bool operator==(const query_op&, const query_op&) = default;
};
struct bps_update_op {
  std::vector<std::uint64_t> j, v;
  friend bool operator==(const bps_update_op&, const bps_update_op&) = default;
};
struct bps_query_op {
  std::vector<std::uint64_t> j;
  friend bool operator==(const bps_query_op&, const bps_query_op&) = default;
};

using operation = std::variant<insert_op, delete_op, query_op, bps_update_op, bps_query_op>;
using operation_sequence = std::vector<operation>;

inline bool is_query(const operation& op) {
  return std::holds_alternative<query_op>(op) || std::holds_alternative<bps_query_op>(op);
}

inline bool is_interval_op(const operation& op) {
  return std::holds_alternative<insert_op>(op) || std::holds_alternative<delete_op>(op) ||
         std::holds_alternative<query_op>(op);
}

inline const char* op_name(const operation& op) {
  constexpr const char* names[] = {"insert", "delete", "query", "bps_update", "bps_query"};
  return names[op.index()];
}

inline nlohmann::json to_json(const operation& op) {
  return std::visit(
      [](const auto& o) -> nlohmann::json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, insert_op>) return {{"op", "insert"}, {"a", o.a}, {"b", o.b}};
        else if constexpr (std::is_same_v<T, delete_op>) return {{"op", "delete"}, {"a", o.a}, {"b", o.b}};
        else if constexpr (std::is_same_v<T, query_op>) return {{"op", "query"}};
        else if constexpr (std::is_same_v<T, bps_update_op>) return {{"op", "bps_update"}, {"j", o.j}, {"v", o.v}};
        else return {{"op", "bps_query"}, {"j", o.j}};
      },
      op);
}

namespace detail {

inline std::uint64_t get_uint(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw parse_error(std::string("missing field \"") + key + "\"", line);
  if (!it->is_number_unsigned()) throw parse_error(std::string("field \"") + key + "\" must be a nonnegative integer", line);
  return it->get<std::uint64_t>();
}

inline std::vector<std::uint64_t> get_uint_array(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw parse_error(std::string("missing field \"") + key + "\"", line);
  if (!it->is_array()) throw parse_error(std::string("field \"") + key + "\" must be an array", line);
  std::vector<std::uint64_t> out;
  for (const auto& e : *it) {
    if (!e.is_number_unsigned()) throw parse_error(std::string("field \"") + key + "\" must hold nonnegative integers", line);
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

}  // namespace detail

inline operation parse_operation(const std::string& text, std::size_t line = 1) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!obj.is_object()) throw parse_error("expected a JSON object", line);
  auto it = obj.find("op");
  if (it == obj.end() || !it->is_string()) throw parse_error("missing string field \"op\"", line);
  const std::string name = it->get<std::string>();
  if (name == "insert") return insert_op{detail::get_uint(obj, "a", line), detail::get_uint(obj, "b", line)};
  if (name == "delete") return delete_op{detail::get_uint(obj, "a", line), detail::get_uint(obj, "b", line)};
  if (name == "query") return query_op{};
  if (name == "bps_update") {
    bps_update_op u{detail::get_uint_array(obj, "j", line), detail::get_uint_array(obj, "v", line)};
    if (u.j.size() != u.v.size()) throw parse_error("bps_update: j and v differ in length", line);
    return u;
  }
  if (name == "bps_query") return bps_query_op{detail::get_uint_array(obj, "j", line)};
  throw parse_error("unknown op \"" + name + "\"", line);
}

// Blank lines are skipped; errors carry the 1-based line number.
inline operation_sequence read_trace(std::istream& in) {
  operation_sequence out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_operation(text, line));
  }
  return out;
}

inline void write_trace(std::ostream& os, const operation_sequence& ops) {
  for (const auto& op : ops) os << to_json(op).dump() << '\n';
}

inline void write_answers(std::ostream& os, const std::vector<std::uint64_t>& answers) {
  for (std::size_t k = 0; k < answers.size(); ++k)
    os << nlohmann::json{{"query_index", k}, {"answer", answers[k]}}.dump() << '\n';
}

}  // namespace probelab
