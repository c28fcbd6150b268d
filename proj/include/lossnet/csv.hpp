#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

namespace lossnet {

// Minimal RFC-4180 CSV emitter: fields containing commas, quotes or
// newlines are quoted, embedded quotes doubled.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(std::span<const std::string> fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            write_field(fields[i]);
        }
        out_ << '\n';
    }

    void row(std::initializer_list<std::string> fields) {
        row(std::span<const std::string>(fields.begin(), fields.size()));
    }

    static std::string num(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return buf;
    }

    static std::string num(long long x) { return std::to_string(x); }
    static std::string num(int x) { return std::to_string(x); }
    static std::string num(std::uint64_t x) { return std::to_string(x); }

private:
    void write_field(const std::string& f) {
        if (f.find_first_of(",\"\n\r") == std::string::npos) {
            out_ << f;
            return;
        }
        out_ << '"';
        for (char c : f) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }

    std::ostream& out_;
};

} // namespace lossnet
