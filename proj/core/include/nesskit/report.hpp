#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nesskit {

// Minimal ordered JSON value for deterministic report emission: keys keep
// insertion order and every double prints with 17 significant digits.
class JsonValue {
public:
    JsonValue() : kind_(Kind::Null) {}
    static JsonValue object();
    static JsonValue array();
    JsonValue(double v) : kind_(Kind::Number), number_(v) {}
    JsonValue(int v) : kind_(Kind::Number), number_(v) {}
    JsonValue(bool v) : kind_(Kind::Boolean), boolean_(v) {}
    JsonValue(const char* v) : kind_(Kind::String), string_(v) {}
    JsonValue(std::string v) : kind_(Kind::String), string_(std::move(v)) {}

    JsonValue& set(const std::string& key, JsonValue v);
    JsonValue& push(JsonValue v);

    std::string dump(int indent = 2) const;

private:
    enum class Kind { Null, Object, Array, Number, Boolean, String };
    void write(std::string& out, int indent, int depth) const;

    Kind kind_;
    double number_ = 0.0;
    bool boolean_ = false;
    std::string string_;
    std::vector<std::pair<std::string, JsonValue>> members_;
    std::vector<JsonValue> elements_;
};

// Formats a double with 17 significant digits (%.17g).
std::string format_double(double v);

// Row-major [re, im] pair encoding for matrices.
JsonValue matrix_to_json(const Eigen::MatrixXcd& m);
JsonValue matrix_to_json(const Eigen::MatrixXd& m);
JsonValue vector_to_json(const Eigen::VectorXd& v);
JsonValue complex_to_json(std::complex<double> z);

} // namespace nesskit
