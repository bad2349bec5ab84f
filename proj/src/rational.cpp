#include "worldlet/rational.hpp"

#include "worldlet/errors.hpp"

#include <cctype>

namespace worldlet {
namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view s) {
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return mpz_class(digits, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto bad = [&] { return ParseError("invalid rational literal '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') throw bad();
        mpz_class d = parse_integer(den);
        if (d == 0) throw bad();
        Rational r(parse_integer(num), d);
        r.canonicalize();
        return r;
    }

    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot);
        auto frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
        if (whole.empty() && frac.empty()) throw bad();
        for (char c : whole) if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
        for (char c : frac) if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        mpz_class num = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
        num *= scale;
        if (!frac.empty()) num += mpz_class(std::string(frac), 10);
        if (negative) num = -num;
        Rational r(num, scale);
        r.canonicalize();
        return r;
    }

    if (!is_integer_literal(text)) throw bad();
    return Rational(parse_integer(text));
}

std::string format_rational(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace worldlet
