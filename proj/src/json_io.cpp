#include "underreport/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "underreport/csv.hpp"

namespace underreport {

namespace {

void emit(const Json& value, std::string& out, int indent, int depth) {
  std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();  // reuse the library's string escaping
        out += ": ";
        emit(it.value(), out, indent, depth + 1);
      }
      out += '\n';
      out += close_pad;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(item, out, indent, depth + 1);
      }
      out += '\n';
      out += close_pad;
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      double v = value.get<double>();
      if (!std::isfinite(v)) {
        out += "null";  // JSON has no NaN/inf
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string dump_json_17(const Json& value, int indent) {
  std::string out;
  emit(value, out, indent, 0);
  out += '\n';
  return out;
}

void write_json_atomic(const std::string& path, const Json& value) {
  write_file_atomic(path, dump_json_17(value));
}

}  // namespace underreport
