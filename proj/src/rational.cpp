#include "gensum/rational.hpp"

#include <charconv>

#include "gensum/errors.hpp"

namespace gensum {

namespace {

std::int64_t parse_int(std::string_view part, std::string_view whole) {
    std::int64_t v = 0;
    const char* first = part.data();
    const char* last = part.data() + part.size();
    if (!part.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (part.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("malformed rational \"" + std::string(whole) + "\" (expected p/q)");
    }
    return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, text));
    const auto num = parse_int(text.substr(0, slash), text);
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw ConfigError("rational \"" + std::string(text) + "\" has zero denominator");
    return Rational(num, den);
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

}  // namespace gensum
