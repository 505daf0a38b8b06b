#include "argmin/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "argmin/errors.hpp"

namespace argmin {

JsonValue JsonValue::object() {
  JsonValue v;
  v.type_ = Type::Object;
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.type_ = Type::Array;
  return v;
}

JsonValue JsonValue::number(double x) {
  JsonValue v;
  v.type_ = Type::Number;
  v.num_ = x;
  return v;
}

JsonValue JsonValue::integer(long long x) {
  JsonValue v;
  v.type_ = Type::Integer;
  v.int_ = x;
  return v;
}

JsonValue JsonValue::string(std::string x) {
  JsonValue v;
  v.type_ = Type::String;
  v.str_ = std::move(x);
  return v;
}

JsonValue JsonValue::boolean(bool x) {
  JsonValue v;
  v.type_ = Type::Bool;
  v.bool_ = x;
  return v;
}

JsonValue JsonValue::null() { return JsonValue(); }

JsonValue JsonValue::vector(const VectorXd& x) {
  JsonValue v = array();
  for (long i = 0; i < x.size(); ++i) v.push(number(x(i)));
  return v;
}

JsonValue JsonValue::matrix(const MatrixXd& m) {
  JsonValue v = array();
  for (long i = 0; i < m.rows(); ++i) {
    JsonValue row = array();
    for (long j = 0; j < m.cols(); ++j) row.push(number(m(i, j)));
    v.push(std::move(row));
  }
  return v;
}

JsonValue& JsonValue::add(const std::string& key, JsonValue v) {
  if (type_ != Type::Object) throw std::logic_error("add() on a non-object");
  members_.emplace_back(key, std::move(v));
  return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
  if (type_ != Type::Array) throw std::logic_error("push() on a non-array");
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void indent_into(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(2 * depth), ' ');
}

}  // namespace

void JsonValue::write(std::string& out, int depth) const {
  switch (type_) {
    case Type::Null:
      out += "null";
      return;
    case Type::Bool:
      out += bool_ ? "true" : "false";
      return;
    case Type::Integer: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%lld", int_);
      out += buf;
      return;
    }
    case Type::Number: {
      if (!std::isfinite(num_)) {
        out += "null";  // JSON has no literal for these
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", num_);
      out += buf;
      return;
    }
    case Type::String:
      escape_into(out, str_);
      return;
    case Type::Array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        indent_into(out, depth + 1);
        items_[i].write(out, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      indent_into(out, depth);
      out += ']';
      return;
    }
    case Type::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        indent_into(out, depth + 1);
        escape_into(out, members_[i].first);
        out += ": ";
        members_[i].second.write(out, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      indent_into(out, depth);
      out += '}';
      return;
    }
  }
}

std::string JsonValue::dump() const {
  std::string out;
  write(out, 0);
  out += '\n';
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open output file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("failed writing output file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DataError("cannot move output into place: " + path);
}

}  // namespace argmin
