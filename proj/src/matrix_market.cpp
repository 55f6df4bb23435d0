#include "aafp/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

namespace aafp {

MatrixMarketError::MatrixMarketError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

namespace {

std::string lowercase(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool blank(const std::string& line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

enum class Symmetry { General, Symmetric };

Symmetry parse_banner(const std::string& line)
{
    std::istringstream in(line);
    std::string tag, object, format, field, symmetry;
    if (!(in >> tag >> object >> format >> field >> symmetry) || tag != "%%MatrixMarket") {
        throw MatrixMarketError(1, "malformed header");
    }
    object = lowercase(object);
    format = lowercase(format);
    field = lowercase(field);
    symmetry = lowercase(symmetry);
    if (object != "matrix") throw MatrixMarketError(1, "malformed header: object '" + object + "'");
    if (format != "coordinate") throw MatrixMarketError(1, "unsupported format '" + format + "'");
    if (field != "real" && field != "double" && field != "integer") {
        throw MatrixMarketError(1, "unsupported field '" + field + "'");
    }
    if (symmetry == "general") return Symmetry::General;
    if (symmetry == "symmetric") return Symmetry::Symmetric;
    throw MatrixMarketError(1, "unsupported symmetry '" + symmetry + "'");
}

} // namespace

CsrMatrix parse_matrix_market(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw MatrixMarketError(0, "malformed header: empty input");
    ++lineno;
    const Symmetry symmetry = parse_banner(line);

    // Size line, after % comments and blank lines.
    std::size_t rows = 0, cols = 0, declared = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line.front() == '%') continue;
        std::istringstream sz(line);
        long long r = -1, c = -1, n = -1;
        if (!(sz >> r >> c >> n) || r < 0 || c < 0 || n < 0) {
            throw MatrixMarketError(lineno, "malformed size line");
        }
        rows = static_cast<std::size_t>(r);
        cols = static_cast<std::size_t>(c);
        declared = static_cast<std::size_t>(n);
        have_size = true;
        break;
    }
    if (!have_size) throw MatrixMarketError(lineno, "missing size line");
    if (symmetry == Symmetry::Symmetric && rows != cols) {
        throw MatrixMarketError(lineno, "symmetric matrix must be square");
    }

    std::vector<Triplet> entries;
    entries.reserve(symmetry == Symmetry::Symmetric ? 2 * declared : declared);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line.front() == '%') continue;
        std::istringstream entry(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(entry >> i >> j >> v)) throw MatrixMarketError(lineno, "malformed entry");
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols) {
            throw MatrixMarketError(lineno, "index out of bounds (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ")");
        }
        const auto r = static_cast<std::size_t>(i - 1);
        const auto c = static_cast<std::size_t>(j - 1);
        entries.push_back({r, c, v});
        if (symmetry == Symmetry::Symmetric && r != c) entries.push_back({c, r, v});
        ++seen;
    }
    if (seen != declared) {
        throw MatrixMarketError(lineno, "expected " + std::to_string(declared) + " entries, found " +
                                            std::to_string(seen));
    }
    return CsrMatrix::from_triplets(rows, cols, std::move(entries));
}

Vector parse_matrix_market_vector(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw MatrixMarketError(0, "malformed header: empty input");
    ++lineno;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    if (!(banner >> tag >> object >> format >> field >> symmetry) || tag != "%%MatrixMarket" ||
        lowercase(object) != "matrix") {
        throw MatrixMarketError(1, "malformed header");
    }
    if (lowercase(format) == "coordinate") {
        std::istringstream rest(line + "\n" + std::string(std::istreambuf_iterator<char>(in), {}));
        const CsrMatrix m = parse_matrix_market(rest);
        if (m.cols() != 1) throw MatrixMarketError(0, "vector must have exactly one column");
        Vector out(m.rows(), 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m.at(i, 0);
        return out;
    }
    if (lowercase(format) != "array") throw MatrixMarketError(1, "unsupported format '" + format + "'");
    field = lowercase(field);
    if (field != "real" && field != "double" && field != "integer") {
        throw MatrixMarketError(1, "unsupported field '" + field + "'");
    }
    if (lowercase(symmetry) != "general") throw MatrixMarketError(1, "unsupported symmetry '" + symmetry + "'");

    std::size_t rows = 0;
    bool have_size = false;
    Vector out;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line.front() == '%') continue;
        std::istringstream tokens(line);
        if (!have_size) {
            long long r = -1, c = -1;
            if (!(tokens >> r >> c) || r < 0 || c != 1) throw MatrixMarketError(lineno, "malformed size line");
            rows = static_cast<std::size_t>(r);
            out.reserve(rows);
            have_size = true;
            continue;
        }
        double v = 0.0;
        if (!(tokens >> v)) throw MatrixMarketError(lineno, "malformed entry");
        if (out.size() == rows) throw MatrixMarketError(lineno, "more than " + std::to_string(rows) + " entries");
        out.push_back(v);
    }
    if (!have_size) throw MatrixMarketError(lineno, "missing size line");
    if (out.size() != rows) {
        throw MatrixMarketError(lineno, "expected " + std::to_string(rows) + " entries, found " +
                                            std::to_string(out.size()));
    }
    return out;
}

Vector read_matrix_market_vector(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MatrixMarketError(0, "cannot open '" + path.string() + "'");
    return parse_matrix_market_vector(in);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MatrixMarketError(0, "cannot open '" + path.string() + "'");
    return parse_matrix_market(in);
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    out << std::setprecision(17);
    const auto row_ptr = a.row_ptr();
    const auto col_idx = a.col_idx();
    const auto values = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            out << i + 1 << ' ' << col_idx[p] + 1 << ' ' << values[p] << '\n';
}

} // namespace aafp
