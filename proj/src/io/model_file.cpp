#include "decaykit/io/model_file.hpp"

#include "decaykit/errors.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace decaykit::io {

namespace {

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

template <class T>
T read_field(std::istringstream& ss, int line, const char* what) {
    T v{};
    if (!(ss >> v)) throw ModelFileError(std::string("expected ") + what, line);
    return v;
}

void expect_end(std::istringstream& ss, int line) {
    std::string extra;
    if (ss >> extra) throw ModelFileError("unexpected trailing field `" + extra + "`", line);
}

} // namespace

FiniteLevelModel parse_model(std::istream& in, const std::string& base_dir) {
    Index dim = -1;
    std::vector<Index> subspace;
    std::map<std::pair<Index, Index>, cplx> entries;
    bool continuum = false;
    double emin = 0.0;
    std::vector<Coupling> couplings;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ss(strip_comment(raw));
        std::string head;
        if (!(ss >> head)) continue;

        if (head == "dim") {
            if (dim >= 0) throw ModelFileError("duplicate `dim` line", line);
            dim = read_field<Index>(ss, line, "a dimension after `dim`");
            if (dim <= 0) throw ModelFileError("dimension must be positive", line);
            expect_end(ss, line);
            continue;
        }
        if (dim < 0) throw ModelFileError("the first line must be `dim D`", line);

        if (head == "subspace") {
            if (!subspace.empty()) throw ModelFileError("duplicate `subspace` line", line);
            Index i;
            while (ss >> i) {
                if (i < 0 || i >= dim) throw ModelFileError("subspace index out of range", line);
                subspace.push_back(i);
            }
            if (!ss.eof()) throw ModelFileError("subspace indices must be integers", line);
            if (subspace.empty()) throw ModelFileError("empty subspace", line);
            continue;
        }
        if (head == "continuum") {
            if (continuum) throw ModelFileError("duplicate `continuum` line", line);
            continuum = true;
            emin = read_field<double>(ss, line, "emin after `continuum`");
            expect_end(ss, line);
            continue;
        }
        if (head == "flat" || head == "tabulated") {
            if (!continuum) throw ModelFileError("coupling line before `continuum`", line);
            try {
                if (head == "flat") {
                    const double gamma = read_field<double>(ss, line, "gamma");
                    const double cutoff = read_field<double>(ss, line, "cutoff");
                    expect_end(ss, line);
                    couplings.push_back(Coupling::flat(gamma, emin, cutoff));
                } else {
                    const std::string file = read_field<std::string>(ss, line, "a file name");
                    expect_end(ss, line);
                    std::filesystem::path p(file);
                    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                    auto [e, g] = load_two_columns(p.string());
                    couplings.push_back(Coupling::tabulated(std::move(e), std::move(g)));
                }
            } catch (const DomainError& e) {
                throw ModelFileError(e.what(), line);
            }
            continue;
        }

        // Matrix entry.
        std::istringstream es(strip_comment(raw));
        const Index i = read_field<Index>(es, line, "`i j re im`");
        const Index j = read_field<Index>(es, line, "`i j re im`");
        const double re = read_field<double>(es, line, "`i j re im`");
        const double im = read_field<double>(es, line, "`i j re im`");
        expect_end(es, line);
        if (i < 0 || j < 0 || i >= dim || j >= dim) throw ModelFileError("entry index out of range", line);
        if (i > j) throw ModelFileError("entries must be in the upper triangle (i <= j)", line);
        if (i == j && im != 0.0) throw ModelFileError("diagonal entries must be real", line);
        if (!entries.emplace(std::make_pair(i, j), cplx(re, im)).second)
            throw ModelFileError("duplicate entry", line);
    }
    if (dim < 0) throw ModelFileError("empty model file");

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [ij, v] : entries) {
        h(ij.first, ij.second) = v;
        h(ij.second, ij.first) = std::conj(v);
    }
    try {
        if (continuum) {
            if (static_cast<Index>(couplings.size()) != dim)
                throw ModelFileError("continuum models need one coupling line per subspace state (" +
                                     std::to_string(dim) + ")");
            for (std::size_t k = 0; k < subspace.size(); ++k)
                if (subspace[k] != static_cast<Index>(k))
                    throw ModelFileError("continuum models use the whole matrix as the subspace (0 .. D-1)");
            return FiniteLevelModel(std::move(h), Continuum(emin, std::move(couplings)));
        }
        if (subspace.empty()) throw ModelFileError("missing `subspace` line");
        return FiniteLevelModel(std::move(h), std::move(subspace));
    } catch (const DomainError& e) {
        throw ModelFileError(e.what());
    }
}

FiniteLevelModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelFileError("cannot open model file `" + path + "`");
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_model(in, dir.empty() ? "." : dir.string());
}

std::pair<std::vector<double>, std::vector<double>> load_two_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelFileError("cannot open table `" + path + "`");
    std::vector<double> a, b;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = strip_comment(raw);
        for (char& c : text)
            if (c == ',') c = ' ';
        std::istringstream ss(text);
        double x, y;
        if (!(ss >> x)) continue;
        if (!(ss >> y)) throw ModelFileError(path + ": expected two columns", line);
        expect_end(ss, line);
        a.push_back(x);
        b.push_back(y);
    }
    if (a.empty()) throw ModelFileError(path + ": no data rows");
    return {std::move(a), std::move(b)};
}

} // namespace decaykit::io
