#include "finepot/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "finepot/error.hpp"

namespace finepot {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call } kind = Kind::Number;
    double value = 0.0;
    int index = 0;
    std::string op;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Token {
    enum class Kind { Number, Name, Op, End } kind = Kind::End;
    std::string text;
    double value = 0.0;
    std::size_t pos = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    NodePtr parse() {
        auto n = expression(0);
        if (tok_.kind != Token::Kind::End) error("unexpected '" + tok_.text + "'");
        return n;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        std::ostringstream os;
        os << "expression \"" << src_ << "\": " << what << " at position " << tok_.pos;
        fail(ErrorKind::Config, os.str());
    }

    void advance() {
        while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) ++at_;
        tok_ = Token{};
        tok_.pos = at_;
        if (at_ >= src_.size()) return;
        char c = src_[at_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            std::string rest(src_.substr(at_));
            try {
                tok_.value = std::stod(rest, &used);
            } catch (const std::exception&) {
                error("bad number");
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = rest.substr(0, used);
            at_ += used;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = at_;
            while (at_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) ++at_;
            tok_.kind = Token::Kind::Name;
            tok_.text = std::string(src_.substr(b, at_ - b));
            return;
        }
        static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||", "**"};
        for (const char* t : two)
            if (src_.substr(at_, 2) == t) {
                tok_.kind = Token::Kind::Op;
                tok_.text = t == std::string_view("**") ? "^" : t;
                at_ += 2;
                return;
            }
        if (std::string_view("+-*/^()<>,!").find(c) == std::string_view::npos) error(std::string("invalid character '") + c + "'");
        tok_.kind = Token::Kind::Op;
        tok_.text = std::string(1, c);
        ++at_;
    }

    static int binding(const std::string& op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
        if (op == "+" || op == "-") return 5;
        if (op == "*" || op == "/") return 6;
        if (op == "^") return 8;
        return 0;
    }

    NodePtr expression(int min_bp) {
        auto lhs = prefix();
        while (tok_.kind == Token::Kind::Op) {
            int bp = binding(tok_.text);
            if (bp == 0 || bp <= min_bp) break;
            std::string op = tok_.text;
            advance();
            // ^ is right associative
            auto rhs = expression(op == "^" ? bp - 1 : bp);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Binary;
            n->op = op;
            n->args = {lhs, rhs};
            lhs = n;
        }
        return lhs;
    }

    NodePtr prefix() {
        auto n = std::make_shared<Node>();
        if (tok_.kind == Token::Kind::Number) {
            n->value = tok_.value;
            advance();
            return n;
        }
        if (tok_.kind == Token::Kind::Op && (tok_.text == "-" || tok_.text == "+" || tok_.text == "!")) {
            std::string op = tok_.text;
            advance();
            n->kind = Node::Kind::Unary;
            n->op = op;
            n->args = {expression(7)};
            return n;
        }
        if (tok_.kind == Token::Kind::Op && tok_.text == "(") {
            advance();
            auto inner = expression(0);
            expect(")");
            return inner;
        }
        if (tok_.kind == Token::Kind::Name) {
            std::string name = tok_.text;
            advance();
            if (tok_.kind == Token::Kind::Op && tok_.text == "(") {
                advance();
                n->kind = Node::Kind::Call;
                n->op = name;
                if (!(tok_.kind == Token::Kind::Op && tok_.text == ")")) {
                    n->args.push_back(expression(0));
                    while (tok_.kind == Token::Kind::Op && tok_.text == ",") {
                        advance();
                        n->args.push_back(expression(0));
                    }
                }
                expect(")");
                check_call(*n);
                return n;
            }
            if (name == "pi") n->value = std::numbers::pi;
            else if (name == "e") n->value = std::numbers::e;
            else if (name == "inf") n->value = std::numeric_limits<double>::infinity();
            else {
                n->kind = Node::Kind::Variable;
                if (name == "x" || name == "x1") n->index = 0;
                else if (name == "y" || name == "x2") n->index = 1;
                else if (name == "z" || name == "x3") n->index = 2;
                else error("unknown name '" + name + "'");
            }
            return n;
        }
        error(tok_.kind == Token::Kind::End ? "unexpected end" : "unexpected '" + tok_.text + "'");
    }

    void expect(const char* op) {
        if (!(tok_.kind == Token::Kind::Op && tok_.text == op)) error(std::string("expected '") + op + "'");
        advance();
    }

    void check_call(const Node& n) {
        static const char* unary[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "floor"};
        static const char* binary[] = {"atan2", "min", "max", "pow"};
        for (const char* f : unary)
            if (n.op == f) {
                if (n.args.size() != 1) error(n.op + " takes one argument");
                return;
            }
        for (const char* f : binary)
            if (n.op == f) {
                if (n.args.size() != 2) error(n.op + " takes two arguments");
                return;
            }
        error("unknown function '" + n.op + "'");
    }

    std::string_view src_;
    std::size_t at_ = 0;
    Token tok_;
};

double eval(const Node& n, std::span<const double> x) {
    switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Variable:
        require(static_cast<std::size_t>(n.index) < x.size(), "expression uses a coordinate beyond the dimension",
                ErrorKind::Config);
        return x[static_cast<std::size_t>(n.index)];
    case Node::Kind::Unary: {
        double a = eval(*n.args[0], x);
        if (n.op == "-") return -a;
        if (n.op == "!") return a == 0.0 ? 1.0 : 0.0;
        return a;
    }
    case Node::Kind::Binary: {
        const auto& op = n.op;
        double a = eval(*n.args[0], x);
        if (op == "&&") return a != 0.0 && eval(*n.args[1], x) != 0.0 ? 1.0 : 0.0;
        if (op == "||") return a != 0.0 || eval(*n.args[1], x) != 0.0 ? 1.0 : 0.0;
        double b = eval(*n.args[1], x);
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "/") return a / b;
        if (op == "^") return std::pow(a, b);
        if (op == "<") return a < b;
        if (op == "<=") return a <= b;
        if (op == ">") return a > b;
        if (op == ">=") return a >= b;
        if (op == "==") return a == b;
        return a != b;
    }
    case Node::Kind::Call: {
        const auto& f = n.op;
        double a = eval(*n.args[0], x);
        if (f == "sin") return std::sin(a);
        if (f == "cos") return std::cos(a);
        if (f == "tan") return std::tan(a);
        if (f == "exp") return std::exp(a);
        if (f == "log") return std::log(a);
        if (f == "sqrt") return std::sqrt(a);
        if (f == "abs") return std::abs(a);
        if (f == "floor") return std::floor(a);
        double b = eval(*n.args[1], x);
        if (f == "atan2") return std::atan2(a, b);
        if (f == "min") return std::min(a, b);
        if (f == "max") return std::max(a, b);
        return std::pow(a, b);
    }
    }
    return 0.0;
}

} // namespace

Expression Expression::parse(std::string_view text) {
    Expression e;
    e.text_ = std::string(text);
    e.root_ = Parser(e.text_).parse();
    return e;
}

double Expression::operator()(std::span<const double> x) const {
    require(root_ != nullptr, "empty expression", ErrorKind::Config);
    return eval(*root_, x);
}

} // namespace finepot
