#include "sciqa/json_util.hpp"

#include <cctype>
#include <sstream>

namespace sciqa {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_code_fences(const std::string& text) {
    std::ostringstream out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).rfind("```", 0) == 0) continue;
        if (!first) out << '\n';
        out << line;
        first = false;
    }
    return out.str();
}

std::optional<std::string> extract_balanced(const std::string& text, char open, char close) {
    size_t start = text.find(open);
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\') {
                    ++i;  // skip escaped char
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == open) {
                ++depth;
            } else if (c == close) {
                --depth;
                if (depth == 0) return text.substr(start, i - start + 1);
            }
        }
        // Unbalanced from this position; try the next opener.
        start = text.find(open, start + 1);
    }
    return std::nullopt;
}

static std::optional<nlohmann::json> parse_region(const std::string& reply, char open, char close) {
    std::string cleaned = strip_code_fences(reply);
    size_t from = 0;
    while (from < cleaned.size()) {
        auto region = extract_balanced(cleaned.substr(from), open, close);
        if (!region) return std::nullopt;
        auto parsed = nlohmann::json::parse(*region, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
        from += cleaned.substr(from).find(open) + 1;
    }
    return std::nullopt;
}

std::optional<nlohmann::json> first_json_array(const std::string& reply) {
    return parse_region(reply, '[', ']');
}

std::optional<nlohmann::json> first_json_object(const std::string& reply) {
    return parse_region(reply, '{', '}');
}

std::optional<double> first_number(const std::string& reply) {
    for (size_t i = 0; i < reply.size(); ++i) {
        char c = reply[i];
        bool starts_number = std::isdigit(static_cast<unsigned char>(c)) ||
                             ((c == '-' || c == '+') && i + 1 < reply.size() &&
                              std::isdigit(static_cast<unsigned char>(reply[i + 1])));
        if (!starts_number) continue;
        try {
            size_t consumed = 0;
            double v = std::stod(reply.substr(i), &consumed);
            if (consumed > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

}  // namespace sciqa
