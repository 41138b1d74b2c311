#include "nesskit/report.hpp"

#include <cmath>
#include <cstdio>

namespace nesskit {

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind_ = Kind::Object;
    return v;
}

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind_ = Kind::Array;
    return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    members_.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    elements_.push_back(std::move(v));
    return *this;
}

std::string format_double(double v) {
    // JSON has no non-finite literals; companion flags carry the information.
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

} // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<size_t>(indent) * (static_cast<size_t>(depth) + 1), ' ');
    const std::string close_pad(static_cast<size_t>(indent) * static_cast<size_t>(depth), ' ');
    switch (kind_) {
        case Kind::Null: out += "null"; break;
        case Kind::Number: out += format_double(number_); break;
        case Kind::Boolean: out += boolean_ ? "true" : "false"; break;
        case Kind::String: write_escaped(out, string_); break;
        case Kind::Object: {
            if (members_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (size_t i = 0; i < members_.size(); ++i) {
                out += pad;
                write_escaped(out, members_[i].first);
                out += ": ";
                members_[i].second.write(out, indent, depth + 1);
                if (i + 1 < members_.size()) out += ',';
                out += '\n';
            }
            out += close_pad + "}";
            break;
        }
        case Kind::Array: {
            if (elements_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (size_t i = 0; i < elements_.size(); ++i) {
                out += pad;
                elements_[i].write(out, indent, depth + 1);
                if (i + 1 < elements_.size()) out += ',';
                out += '\n';
            }
            out += close_pad + "]";
            break;
        }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    out += '\n';
    return out;
}

JsonValue complex_to_json(std::complex<double> z) {
    JsonValue pair = JsonValue::array();
    pair.push(z.real());
    pair.push(z.imag());
    return pair;
}

JsonValue matrix_to_json(const Eigen::MatrixXcd& m) {
    JsonValue rows = JsonValue::array();
    for (int r = 0; r < m.rows(); ++r) {
        JsonValue row = JsonValue::array();
        for (int c = 0; c < m.cols(); ++c) row.push(complex_to_json(m(r, c)));
        rows.push(std::move(row));
    }
    return rows;
}

JsonValue matrix_to_json(const Eigen::MatrixXd& m) {
    JsonValue rows = JsonValue::array();
    for (int r = 0; r < m.rows(); ++r) {
        JsonValue row = JsonValue::array();
        for (int c = 0; c < m.cols(); ++c) row.push(complex_to_json({m(r, c), 0.0}));
        rows.push(std::move(row));
    }
    return rows;
}

JsonValue vector_to_json(const Eigen::VectorXd& v) {
    JsonValue arr = JsonValue::array();
    for (int i = 0; i < v.size(); ++i) arr.push(v(i));
    return arr;
}

} // namespace nesskit
