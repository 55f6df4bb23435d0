#include "aafp/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace aafp {

namespace {

// σ(z) = 1 / (1 + e^{−z}) without overflow for large |z|.
double sigmoid(double z)
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^{z}) without overflow.
double softplus(double z)
{
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

} // namespace

void LogisticDataset::validate() const
{
    if (samples.rows() != labels.size()) throw std::invalid_argument("logistic dataset: rows and labels differ");
    for (double y : labels)
        if (y != 1.0 && y != -1.0) throw std::invalid_argument("logistic dataset: labels must be +1 or -1");
    if (!(beta > 0.0)) throw std::invalid_argument("logistic dataset: beta must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("logistic dataset: eta must be positive");
}

double logistic_objective(const LogisticDataset& data, std::span<const double> x)
{
    const Vector margins = mat_vec(data.samples, x);
    double loss = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) loss += softplus(-data.labels[i] * margins[i]);
    const double rows = static_cast<double>(std::max<std::size_t>(margins.size(), 1));
    return loss / rows + 0.5 * data.beta * dot(x, x);
}

Vector logistic_gradient(const LogisticDataset& data, std::span<const double> x)
{
    if (x.size() != data.samples.cols()) throw DimensionError("logistic_gradient: x has the wrong length");
    const Vector margins = mat_vec(data.samples, x);
    const double rows = static_cast<double>(std::max<std::size_t>(margins.size(), 1));
    Vector weights(margins.size());
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double y = data.labels[i];
        weights[i] = -y * sigmoid(-y * margins[i]) / rows;
    }
    Vector grad = mat_transpose_vec(data.samples, weights);
    axpy(data.beta, x, grad);
    return grad;
}

FixedPointMap gd_map(LogisticDataset data)
{
    data.validate();
    const std::size_t n = data.samples.cols();
    return FixedPointMap(n, [data = std::move(data)](std::span<const double> x) {
        FixedPointMap::Evaluation out{Vector(x.begin(), x.end()), scaled(logistic_gradient(data, x), -data.eta)};
        axpy(1.0, out.residual, out.value);
        return out;
    });
}

LogisticDataset synthetic_logistic(SeededRng& rng, std::size_t rows, std::size_t features, double beta, double eta)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(features, 1)));
    const Vector planted = rng_normal(rng, features);
    std::vector<Triplet> entries;
    entries.reserve(rows * features);
    Vector labels(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double margin = 0.0;
        for (std::size_t j = 0; j < features; ++j) {
            const double v = scale * rng.normal();
            entries.push_back({i, j, v});
            margin += v * planted[j];
        }
        labels[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-2.0 * margin)) ? 1.0 : -1.0;
    }
    LogisticDataset data{CsrMatrix::from_triplets(rows, features, std::move(entries)), std::move(labels), beta, eta};
    data.validate();
    return data;
}

LibsvmError::LibsvmError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

LibsvmData parse_libsvm(std::istream& in, std::size_t features)
{
    std::vector<Triplet> entries;
    std::vector<double> raw_labels;
    std::map<double, std::size_t> first_seen; // label -> line
    std::size_t columns = features;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string token;
        if (!(tokens >> token)) continue;

        double label = 0.0;
        try {
            std::size_t used = 0;
            label = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw LibsvmError(lineno, "malformed label '" + token + "'");
        }
        const std::size_t row = raw_labels.size();
        raw_labels.push_back(label);
        first_seen.emplace(label, lineno);
        if (first_seen.size() > 2) throw LibsvmError(lineno, "more than two distinct labels");

        long long previous = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            long long index = 0;
            double value = 0.0;
            try {
                if (colon == std::string::npos) throw std::invalid_argument(token);
                std::size_t used = 0;
                index = std::stoll(token.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument(token);
                const std::string v = token.substr(colon + 1);
                value = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw LibsvmError(lineno, "malformed feature '" + token + "'");
            }
            if (index < 1) throw LibsvmError(lineno, "feature index must be >= 1");
            if (index <= previous) throw LibsvmError(lineno, "feature indices must increase");
            previous = index;
            const auto col = static_cast<std::size_t>(index - 1);
            columns = std::max(columns, col + 1);
            entries.push_back({row, col, value});
        }
    }

    const bool signed_labels = std::all_of(first_seen.begin(), first_seen.end(), [](const auto& kv) {
        return kv.first == 1.0 || kv.first == -1.0;
    });
    Vector labels(raw_labels.size());
    const double smallest = first_seen.empty() ? 0.0 : first_seen.begin()->first;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = signed_labels ? raw_labels[i] : (raw_labels[i] == smallest ? 1.0 : -1.0);
    }
    return {CsrMatrix::from_triplets(raw_labels.size(), columns, std::move(entries)), std::move(labels)};
}

LibsvmData read_libsvm(const std::filesystem::path& path, std::size_t features)
{
    std::ifstream in(path);
    if (!in) throw LibsvmError(0, "cannot open '" + path.string() + "'");
    return parse_libsvm(in, features);
}

} // namespace aafp
