#include "lcf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lcf/errors.hpp"

namespace lcf {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& out, const GridSpec& spec, const char* kind) {
    out << "# lcf grid v1\n";
    out << "dim " << spec.dim() << '\n';
    for (std::size_t k = 0; k < spec.dim(); ++k)
        out << "axis " << k << ' ' << format_double(spec.lo(k)) << ' ' << format_double(spec.hi(k)) << ' '
            << spec.count(k) << '\n';
    out << "kind " << kind << '\n';
    out << "values\n";
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next line, or false at end of input.
    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    // Next line that is neither blank nor a comment.
    bool next_content(std::string& line) {
        while (next(line)) {
            const auto p = line.find_first_not_of(" \t");
            if (p == std::string::npos || line[p] == '#') continue;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorKind::ParseError, "line " + std::to_string(number_) + ": " + what);
    }
    std::size_t number() const { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

double parse_number(const std::string& token, const LineReader& r, bool allow_inf) {
    if (token == "inf" || token == "+inf") {
        if (!allow_inf) r.fail("'inf' is only allowed in convex-extended files");
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const char* b = token.data();
    const char* e = b + token.size();
    if (!token.empty() && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) r.fail("not a number: '" + token + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

}  // namespace

void write_grid_function(std::ostream& out, const LogConcaveFnGrid& f) {
    write_header(out, f.spec(), "logconcave");
    for (double v : f.values()) out << format_double(v) << '\n';
}

void write_grid_function(std::ostream& out, const ConvexFnGrid& phi) {
    write_header(out, phi.spec(), "convex-extended");
    for (const auto& v : phi.values()) out << (v.is_finite() ? format_double(v.value()) : "inf") << '\n';
}

void save_grid_function(const std::string& path, const GridFunction& fn) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot open '" + path + "' for writing");
    std::visit([&](const auto& g) { write_grid_function(out, g); }, fn);
    require(static_cast<bool>(out), ErrorKind::InvalidArgument, "write to '" + path + "' failed");
}

GridFunction read_grid_function(std::istream& in, LogConcaveChecks checks) {
    LineReader r(in);
    std::string line;
    if (!r.next(line) || line.rfind("# lcf grid v1", 0) != 0) r.fail("expected '# lcf grid v1'");

    if (!r.next_content(line)) r.fail("missing 'dim'");
    auto tok = split(line);
    if (tok.size() != 2 || tok[0] != "dim") r.fail("expected 'dim <n>'");
    const auto dim = static_cast<std::size_t>(parse_number(tok[1], r, false));
    if (dim < 1 || dim > GridSpec::kMaxDim || std::to_string(dim) != tok[1]) r.fail("dim must be 1, 2 or 3");

    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < dim; ++k) {
        if (!r.next_content(line)) r.fail("missing axis " + std::to_string(k));
        tok = split(line);
        if (tok.size() != 5 || tok[0] != "axis" || tok[1] != std::to_string(k))
            r.fail("expected 'axis " + std::to_string(k) + " <lo> <hi> <count>'");
        const double lo = parse_number(tok[2], r, false);
        const double hi = parse_number(tok[3], r, false);
        const double count = parse_number(tok[4], r, false);
        if (count < 3 || count != std::floor(count)) r.fail("axis count must be an integer >= 3");
        if (!(lo < hi)) r.fail("axis needs lo < hi");
        axes.push_back({lo, hi, static_cast<std::size_t>(count)});
    }
    GridSpec spec = [&] {
        try {
            return GridSpec(axes);
        } catch (const Error& e) {
            r.fail(e.what());
        }
    }();

    if (!r.next_content(line)) r.fail("missing 'kind'");
    tok = split(line);
    if (tok.size() != 2 || tok[0] != "kind" || (tok[1] != "logconcave" && tok[1] != "convex-extended"))
        r.fail("expected 'kind logconcave' or 'kind convex-extended'");
    const bool convex = tok[1] == "convex-extended";

    if (!r.next_content(line) || split(line) != std::vector<std::string>{"values"}) r.fail("expected 'values'");

    std::vector<double> values;
    values.reserve(spec.size());
    while (r.next(line)) {
        tok = split(line);
        if (tok.empty()) continue;
        if (tok.size() != 1) r.fail("expected one value per line");
        if (values.size() == spec.size()) r.fail("more values than the grid has nodes");
        const double v = parse_number(tok[0], r, convex);
        if (!convex && v < 0.0) r.fail("log-concave values must be >= 0");
        values.push_back(v);
    }
    if (values.size() != spec.size())
        raise(ErrorKind::ParseError, "line " + std::to_string(r.number()) + ": expected " +
                                         std::to_string(spec.size()) + " values, found " +
                                         std::to_string(values.size()));
    if (convex) return ConvexFnGrid::from_doubles(std::move(spec), values, false);
    return LogConcaveFnGrid(std::move(spec), std::move(values), checks);
}

GridFunction load_grid_function(const std::string& path, LogConcaveChecks checks) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    try {
        return read_grid_function(in, checks);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ParseError) throw;
        std::string msg = e.what();
        const std::string prefix = std::string(to_string(ErrorKind::ParseError)) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        raise(ErrorKind::ParseError, path + ": " + msg);
    }
}

}  // namespace lcf
