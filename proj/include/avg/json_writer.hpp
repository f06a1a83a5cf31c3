#pragma once

// ---------------------------------------------------------------------------
// Minimal deterministic JSON emitter.  Keys appear in insertion order, doubles
// are printed with 17 significant digits (value-preserving round trip), and
// formatting never consults the locale — identical inputs produce
// byte-identical output on every run.
// ---------------------------------------------------------------------------

#include <complex>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace avg {

class JsonWriter {
  public:
    JsonWriter& begin_object() {
        separate();
        out_ += '{';
        stack_.push_back(false);
        return *this;
    }
    JsonWriter& end_object() {
        stack_.pop_back();
        out_ += '}';
        return *this;
    }
    JsonWriter& begin_array() {
        separate();
        out_ += '[';
        stack_.push_back(false);
        return *this;
    }
    JsonWriter& end_array() {
        stack_.pop_back();
        out_ += ']';
        return *this;
    }
    JsonWriter& key(const std::string& name) {
        separate();
        append_string(name);
        out_ += ':';
        pending_value_ = true;
        return *this;
    }
    JsonWriter& value(double v) {
        separate();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ += buf;
        return *this;
    }
    JsonWriter& value(std::int64_t v) {
        separate();
        out_ += std::to_string(v);
        return *this;
    }
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(bool v) {
        separate();
        out_ += v ? "true" : "false";
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        separate();
        append_string(v);
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& value(std::complex<double> z) {
        begin_object();
        key("re").value(z.real());
        key("im").value(z.imag());
        return end_object();
    }
    const std::string& str() const { return out_; }

  private:
    void separate() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!stack_.empty()) {
            if (stack_.back()) out_ += ',';
            stack_.back() = true;
        }
    }
    void append_string(const std::string& s) {
        out_ += '"';
        for (char ch : s) {
            switch (ch) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(ch) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                        out_ += buf;
                    } else {
                        out_ += ch;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<bool> stack_;  // per open container: "already has an element"
    bool pending_value_ = false;
};

}  // namespace avg
