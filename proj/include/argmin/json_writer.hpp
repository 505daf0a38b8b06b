#ifndef ARGMIN_JSON_WRITER_HPP
#define ARGMIN_JSON_WRITER_HPP

#include <string>
#include <utility>
#include <vector>

#include "argmin/dataset.hpp"

namespace argmin {

// Insertion-ordered JSON tree with a deterministic dump: objects keep the
// order keys were added, reals are printed with 17 significant digits, and
// the layout never depends on locale or platform.  This is what makes
// repeated runs byte-identical.
class JsonValue {
 public:
  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double v);
  static JsonValue integer(long long v);
  static JsonValue string(std::string v);
  static JsonValue boolean(bool v);
  static JsonValue null();

  static JsonValue vector(const VectorXd& v);
  static JsonValue matrix(const MatrixXd& m);  // array of row arrays

  JsonValue& add(const std::string& key, JsonValue v);  // object
  JsonValue& push(JsonValue v);                         // array

  std::string dump() const;  // two-space indent, trailing newline

 private:
  enum class Type { Object, Array, Number, Integer, String, Bool, Null };
  Type type_ = Type::Null;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> items_;

  void write(std::string& out, int depth) const;
};

// Serialise to path via a temporary file in the same directory plus rename,
// so readers never observe a partial file.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace argmin

#endif
