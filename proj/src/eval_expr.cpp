#include "bitreal/eval_expr.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bitreal/dyadic.hpp"
#include "bitreal/error.hpp"

namespace bitreal {

std::uint64_t ParsedExpr::total_queries() const {
    std::uint64_t q = 0;
    for (const RealOracle& o : nodes) q += o.query_count();
    return q;
}

std::uint64_t ParsedExpr::total_oracle_bit_ops() const {
    std::uint64_t b = 0;
    for (const RealOracle& o : nodes) b += o.bit_ops_attributed();
    return b;
}

namespace {

struct Token {
    enum class Kind { number, ident, op, end };
    Kind kind = Kind::end;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[i_])))
            ++i_;
        cur_.pos = i_;
        if (i_ >= src_.size()) {
            cur_ = Token{Token::Kind::end, "", i_};
            return;
        }
        char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            bool dot = false;
            while (j < src_.size()) {
                char d = src_[j];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    ++j;
                } else if (d == '.' && !dot) {
                    dot = true;
                    ++j;
                } else {
                    break;
                }
            }
            cur_ = Token{Token::Kind::number, src_.substr(i_, j - i_), i_};
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                    src_[j] == '_'))
                ++j;
            cur_ = Token{Token::Kind::ident, src_.substr(i_, j - i_), i_};
            i_ = j;
            return;
        }
        static const std::string ops = "+-*/^()";
        if (ops.find(c) != std::string::npos) {
            cur_ = Token{Token::Kind::op, std::string(1, c), i_};
            ++i_;
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) +
                         "' at position " + std::to_string(i_));
    }

    const std::string& src_;
    std::size_t i_ = 0;
    Token cur_;
};

class Parser {
  public:
    explicit Parser(const std::string& src) : lex_(src) {}

    ParsedExpr run() {
        RealOracle root = expr();
        if (lex_.peek().kind != Token::Kind::end)
            throw ParseError("unexpected trailing input \"" +
                             lex_.peek().text + "\" at position " +
                             std::to_string(lex_.peek().pos));
        out_.root = root;
        return std::move(out_);
    }

  private:
    RealOracle reg(RealOracle o) {
        out_.nodes.push_back(o);
        return o;
    }

    bool eat_op(const char* sym) {
        if (lex_.peek().kind == Token::Kind::op && lex_.peek().text == sym) {
            lex_.take();
            return true;
        }
        return false;
    }

    RealOracle expr() {
        RealOracle acc = term();
        for (;;) {
            if (eat_op("+")) {
                acc = reg(oracle_add(acc, term()));
            } else if (eat_op("-")) {
                acc = reg(oracle_sub(acc, term()));
            } else {
                return acc;
            }
        }
    }

    RealOracle term() {
        RealOracle acc = unary();
        for (;;) {
            if (eat_op("*")) {
                acc = reg(oracle_mul(acc, unary()));
            } else if (eat_op("/")) {
                acc = reg(oracle_div(acc, unary()));
            } else {
                return acc;
            }
        }
    }

    RealOracle unary() {
        bool neg = false;
        for (;;) {
            if (eat_op("-")) {
                neg = !neg;
            } else if (eat_op("+")) {
                // no-op sign
            } else {
                break;
            }
        }
        RealOracle v = power();
        return neg ? reg(oracle_neg(v)) : v;
    }

    RealOracle power() {
        RealOracle base = atom();
        if (!eat_op("^")) return base;
        bool neg = eat_op("-");
        Token t = lex_.take();
        if (t.kind != Token::Kind::number ||
            t.text.find('.') != std::string::npos)
            throw ParseError("power needs an integer exponent at position " +
                             std::to_string(t.pos));
        if (t.text.size() > 4)
            throw ParseError("power exponent \"" + t.text +
                             "\" is out of the supported range [-1024, 1024]");
        std::int64_t k = std::stoll(t.text);
        if (k > 1024)
            throw ParseError("power exponent " + std::to_string(k) +
                             " is out of the supported range [-1024, 1024]");
        RealOracle p = int_pow(base, k);
        return neg && k != 0 ? reg(oracle_inv(p)) : p;
    }

    // Square-and-multiply; k >= 0.
    RealOracle int_pow(const RealOracle& base, std::int64_t k) {
        if (k == 0) return reg(oracle_from_dyadic(Dyadic(1)));
        RealOracle acc;
        RealOracle sq = base;
        bool have = false;
        for (std::int64_t e = k; e > 0; e >>= 1) {
            if (e & 1) {
                acc = have ? reg(oracle_mul(acc, sq)) : sq;
                have = true;
            }
            if (e > 1) sq = reg(oracle_mul(sq, sq));
        }
        return acc;
    }

    RealOracle atom() {
        Token t = lex_.take();
        if (t.kind == Token::Kind::number) {
            Dyadic d = Dyadic::parse(t.text);
            return reg(oracle_from_dyadic(d));
        }
        if (t.kind == Token::Kind::ident) {
            if (eat_op("(")) {
                RealOracle arg = expr();
                if (!eat_op(")"))
                    throw ParseError("missing ')' for " + t.text +
                                     "( opened at position " +
                                     std::to_string(t.pos));
                if (t.text == "exp") return reg(exp_oracle(arg));
                if (t.text == "sqrt") return reg(sqrt_oracle(arg));
                if (t.text == "cbrt") return reg(cbrt_oracle(arg));
                throw ParseError("unknown function \"" + t.text +
                                 "\"; supported: exp, sqrt, cbrt");
            }
            if (t.text == "pi") return reg(const_oracle(ConstName::pi));
            if (t.text == "e") return reg(const_oracle(ConstName::e));
            if (t.text == "sqrt2") return reg(const_oracle(ConstName::sqrt2));
            throw ParseError("unknown constant \"" + t.text +
                             "\"; supported: pi, e, sqrt2");
        }
        if (t.kind == Token::Kind::op && t.text == "(") {
            RealOracle inner = expr();
            if (!eat_op(")"))
                throw ParseError("missing ')' for group opened at position " +
                                 std::to_string(t.pos));
            return inner;
        }
        throw ParseError(t.kind == Token::Kind::end
                             ? std::string("unexpected end of expression")
                             : "unexpected token \"" + t.text +
                                   "\" at position " + std::to_string(t.pos));
    }

    Lexer lex_;
    ParsedExpr out_;
};

} // namespace

ParsedExpr parse_real_expr(const std::string& text) {
    return Parser(text).run();
}

} // namespace bitreal
