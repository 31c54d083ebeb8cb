#include "lorentree/embed.hpp"
#include "lorentree/gelfand.hpp"
#include "lorentree/lorentz.hpp"
#include "lorentree/suites.hpp"
#include "lorentree/trees.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lorentree;
using json = nlohmann::json;

namespace {

enum Exit { ok = 0, check_failed = 1, bad_input = 2, constraint = 3, not_orthogonal = 4 };

double parse_double(const std::string& text) { return parse_rational(text).get_d(); }

// ---------------------------------------------------------------- embed

struct TreeSource {
    int q = 3;
    int depth = 0;
    // Output id and address of every vertex, in output order.
    std::vector<std::pair<std::string, Address>> vertices;
    std::string base = "w";
};

TreeSource load_tree(const std::string& source, const std::string& base)
{
    TreeSource src;
    if (source.rfind("regular:", 0) == 0) {
        int q = 0;
        int d = 0;
        char comma = 0;
        std::istringstream in(source.substr(8));
        if (!(in >> q >> comma >> d) || comma != ',' || !(in >> std::ws).eof())
            throw InvalidInput("expected regular:q,depth, got '" + source + "'");
        if (q < 2 || d < 0)
            throw InvalidInput("regular tree needs q >= 2 and depth >= 0");
        if (!base.empty() && base != "w")
            throw InvalidInput("--base applies to file trees only");
        src.q = q;
        src.depth = d;
        for (const auto& v : RegularTree(q).ball(d))
            src.vertices.emplace_back(v.to_string(), v);
        return src;
    }
    std::ifstream file(source);
    if (!file)
        throw InvalidInput("cannot open tree file '" + source + "'");
    std::optional<int> b;
    if (!base.empty()) {
        try {
            b = std::stoi(base);
        } catch (const std::exception&) {
            throw InvalidInput("base must be a vertex id of the file tree");
        }
    }
    FiniteTree tree = FiniteTree::parse(file, b);
    FiniteEmbedding fe = complete_finite_tree(tree);
    src.q = fe.valence;
    src.base = std::to_string(tree.base());
    for (int v : tree.vertices()) {
        const Address& a = fe.address.at(v);
        src.depth = std::max(src.depth, static_cast<int>(a.depth()));
        src.vertices.emplace_back(std::to_string(v), a);
    }
    return src;
}

json scalar_json(double x) { return x; }
json scalar_json(const mpq_class& x) { return x.get_str(); }

double relative_gap(double cosh_value, double target) { return std::fabs(cosh_value - target) / target; }

template <class S>
int run_embed(const TreeSource& src, const S& lambda, int depth, const std::string& format, std::ostream& out)
{
    Embedding<S> e(src.q, lambda, depth);
    const Address w;
    std::vector<TreeVec<S>> images;
    for (const auto& [id, a] : src.vertices)
        images.push_back(e.vertex(a));

    const std::size_t n = images.size();
    std::vector<std::vector<S>> cosh(n, std::vector<S>(n));
    double worst = 0.0;
    bool exact_ok = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            cosh[i][k] = -minkowski_B(w, images[i], images[k]);
            S target = 1;
            for (int t = tree_dist(src.vertices[i].second, src.vertices[k].second); t > 0; --t)
                target *= lambda;
            if constexpr (std::is_same_v<S, double>)
                worst = std::max(worst, relative_gap(cosh[i][k], target));
            else
                exact_ok = exact_ok && cosh[i][k] == target;
        }

    if (format == "csv") {
        out << "vertex,address,support,coeff\n";
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [key, c] : images[i]) {
                std::string value;
                if constexpr (std::is_same_v<S, double>)
                    value = fmt::format("{:.17g}", c);
                else
                    value = c.get_str();
                out << src.vertices[i].first << ',' << src.vertices[i].second.to_string() << ','
                    << key.to_string() << ',' << value << '\n';
            }
        return ok;
    }

    json doc;
    if constexpr (std::is_same_v<S, double>)
        doc["lambda"] = lambda;
    else
        doc["lambda"] = lambda.get_str();
    doc["backend"] = std::is_same_v<S, double> ? "float" : "exact";
    doc["valence"] = src.q;
    doc["depth"] = depth;
    doc["base"] = src.base;
    json verts = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json support = json::array();
        json coeffs = json::array();
        for (const auto& [key, c] : images[i]) {
            support.push_back(key.to_string());
            coeffs.push_back(scalar_json(c));
        }
        verts.push_back({{"id", src.vertices[i].first},
                         {"address", src.vertices[i].second.to_string()},
                         {"support", support},
                         {"coeffs", coeffs}});
    }
    doc["vertices"] = verts;
    json table = json::array();
    for (const auto& row : cosh) {
        json r = json::array();
        for (const auto& c : row)
            r.push_back(scalar_json(c));
        table.push_back(r);
    }
    doc["cosh"] = table;
    if constexpr (std::is_same_v<S, double>)
        doc["checks"] = {{"max_residual", worst}};
    else
        doc["checks"] = {{"max_residual", exact_ok ? "0" : "mismatch"}};
    out << doc.dump(1) << '\n';
    return exact_ok ? ok : check_failed;
}

// ---------------------------------------------------------------- classify

LorentzOp read_matrix(std::istream& in)
{
    std::string header;
    if (!std::getline(in, header))
        throw InvalidInput("empty matrix file");
    std::istringstream h(header);
    std::size_t dim = 0;
    std::string basis;
    if (!(h >> dim) || dim < 2)
        throw InvalidInput("first line must start with the dimension (at least 2)");
    h >> basis;
    bool lightcone = true;
    if (basis.empty() || basis.rfind("basis=lplus,lminus", 0) == 0)
        lightcone = true;
    else if (basis == "basis=standard")
        lightcone = false;
    else
        throw InvalidInput("unknown basis '" + basis + "'");

    Matrix<double> m(dim, dim);
    std::size_t count = 0;
    std::string token;
    while (in >> token) {
        if (count == dim * dim)
            throw InvalidInput("too many matrix entries");
        m(count / dim, count % dim) = parse_double(token);
        ++count;
    }
    if (count != dim * dim)
        throw InvalidInput(fmt::format("expected {} entries, found {}", dim * dim, count));
    if (lightcone)
        return LorentzOp{m, lightcone_gram(dim - 2)};
    std::vector<double> diag(dim, 1.0);
    diag[0] = -1.0;
    return LorentzOp{m, Matrix<double>::diagonal(diag)};
}

// ---------------------------------------------------------------- project

struct Loaded {
    std::vector<std::string> ids;
    std::vector<std::map<std::string, double>> vectors;
};

double coeff_value(const json& c)
{
    if (c.is_number())
        return c.get<double>();
    if (c.is_string())
        return parse_double(c.get<std::string>());
    throw InvalidInput("coefficient is neither a number nor a fraction string");
}

Loaded load_embedding(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.contains("vertices") || !doc["vertices"].is_array())
        throw InvalidInput("embed output lacks a vertices array");
    Loaded out;
    for (const auto& v : doc["vertices"]) {
        const auto& s = v.at("support");
        const auto& c = v.at("coeffs");
        if (s.size() != c.size())
            throw InvalidInput("support and coeffs differ in length");
        std::map<std::string, double> vec;
        for (std::size_t i = 0; i < s.size(); ++i)
            vec[s[i].get<std::string>()] = coeff_value(c[i]);
        out.ids.push_back(v.at("id").get<std::string>());
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

int run_project(std::istream& in, std::ostream& out, std::ostream& err)
{
    Loaded data = load_embedding(in);
    const std::string w = "w";
    std::map<std::string, int> index;
    for (const auto& vec : data.vectors)
        for (const auto& kv : vec)
            if (kv.first != w)
                index.emplace(kv.first, static_cast<int>(index.size()));

    const auto n = static_cast<Eigen::Index>(data.vectors.size());
    const auto m = static_cast<Eigen::Index>(index.size());
    Eigen::VectorXd x0(n);
    Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(n, std::max<Eigen::Index>(m, 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& vec = data.vectors[static_cast<std::size_t>(i)];
        auto it = vec.find(w);
        x0(i) = it == vec.end() ? 0.0 : it->second;
        for (const auto& [key, c] : vec)
            if (key != w)
                pos(i, index.at(key)) = c;
    }

    // Two leading directions of sum |f_v><f_v| on the positive part.
    Eigen::MatrixXd dirs = Eigen::MatrixXd::Zero(pos.cols(), 2);
    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pos.transpose() * pos);
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, pos.cols()); ++k)
            dirs.col(k) = eig.eigenvectors().col(pos.cols() - 1 - k);
    }
    Eigen::MatrixXd coords = pos * dirs;

    Eigen::MatrixXd pts(n, 3);
    out << "vertex,px,py\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        double q = -x0(i) * x0(i) + coords.row(i).squaredNorm();
        if (!(q < 0) || x0(i) <= 0)
            throw InvalidInput("vertex " + data.ids[static_cast<std::size_t>(i)] + " is not on the upper sheet");
        double s = 1.0 / std::sqrt(-q);
        pts(i, 0) = x0(i) * s;
        pts(i, 1) = coords(i, 0) * s;
        pts(i, 2) = coords(i, 1) * s;
        out << fmt::format("{},{:.17g},{:.17g}\n", data.ids[static_cast<std::size_t>(i)],
                           pts(i, 1) / (1 + pts(i, 0)), pts(i, 2) / (1 + pts(i, 0)));
    }

    double distortion = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const auto& a = data.vectors[static_cast<std::size_t>(i)];
            const auto& b = data.vectors[static_cast<std::size_t>(k)];
            double bab = 0.0;
            for (const auto& [key, c] : a) {
                auto it = b.find(key);
                if (it != b.end())
                    bab += (key == w ? -1.0 : 1.0) * c * it->second;
            }
            double projected = pts(i, 0) * pts(k, 0) - pts(i, 1) * pts(k, 1) - pts(i, 2) * pts(k, 2);
            double gap = std::fabs(std::acosh(std::max(1.0, -bab)) - std::acosh(std::max(1.0, projected)));
            distortion = std::max(distortion, gap);
        }
    err << fmt::format("projection distortion (max |d - d_disk|): {:.3e}\n", distortion);
    return ok;
}

// ---------------------------------------------------------------- round trip

// Recomputes the cosh table of an embed output from its coefficients. Exact
// output must agree entry for entry, float output to the printed digits.
template <class S>
S read_scalar(const json& c);

template <>
double read_scalar<double>(const json& c)
{
    return coeff_value(c);
}

template <>
mpq_class read_scalar<mpq_class>(const json& c)
{
    if (!c.is_string())
        throw InvalidInput("exact output must store fractions as strings");
    return parse_rational(c.get<std::string>());
}

template <class S>
int recheck(const json& doc, std::ostream& out)
{
    const auto& verts = doc.at("vertices");
    const auto& table = doc.at("cosh");
    const Address w;
    std::vector<TreeVec<S>> vecs;
    std::vector<Address> addr;
    for (const auto& v : verts) {
        TreeVec<S> f;
        const auto& s = v.at("support");
        const auto& c = v.at("coeffs");
        if (s.size() != c.size())
            throw InvalidInput("support and coeffs differ in length");
        for (std::size_t i = 0; i < s.size(); ++i)
            f.set(Address::parse(s[i].get<std::string>()), read_scalar<S>(c[i]));
        vecs.push_back(std::move(f));
        addr.push_back(Address::parse(v.at("address").get<std::string>()));
    }
    if (table.size() != vecs.size())
        throw InvalidInput("cosh table size differs from the vertex count");
    const S lambda = read_scalar<S>(doc.at("lambda"));
    std::size_t table_mismatch = 0;
    std::size_t identity_mismatch = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t k = 0; k < vecs.size(); ++k) {
            S c = -minkowski_B(w, vecs[i], vecs[k]);
            S stored = read_scalar<S>(table.at(i).at(k));
            S target = 1;
            for (int t = tree_dist(addr[i], addr[k]); t > 0; --t)
                target *= lambda;
            if constexpr (std::is_same_v<S, double>) {
                table_mismatch += c != stored;
                worst = std::max(worst, std::fabs(c - target) / target);
            } else {
                table_mismatch += c != stored;
                identity_mismatch += c != target;
            }
        }
    if constexpr (std::is_same_v<S, double>)
        identity_mismatch = worst > 1e-9;
    out << fmt::format("round trip: {} pairs, {} table mismatches, distance identity {}\n",
                       vecs.size() * vecs.size(), table_mismatch,
                       std::is_same_v<S, double> ? fmt::format("max rel residual {:.3e}", worst)
                                                 : fmt::format("{} exact mismatches", identity_mismatch));
    return table_mismatch == 0 && identity_mismatch == 0 ? ok : check_failed;
}

int run_recheck(std::istream& in, std::ostream& out)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
    try {
        if (doc.value("backend", "float") == "exact")
            return recheck<mpq_class>(doc, out);
        return recheck<double>(doc, out);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("unexpected embed output: ") + e.what());
    }
}

// ---------------------------------------------------------------- spherical

std::string basis_name(int shell) { return shell == 0 ? "1_K0" : fmt::format("chi_{}", shell); }

void print_spherical(int q, int max_shell, std::ostream& out)
{
    out << fmt::format("convolution table, valence {}\n", q);
    for (int a = 0; a <= max_shell; ++a)
        for (int b = a; b <= max_shell; ++b)
            out << fmt::format("{} * {} = {}\n", basis_name(a), basis_name(b),
                               convolve(ShellFn::basis(q, a), ShellFn::basis(q, b)).to_string());
    ShellFn phi = spherical_phi0(q);
    SphericalCheck c = check_spherical(phi, max_shell);
    out << fmt::format("phi0 = {}\n", phi.to_string());
    for (const auto& [shell, value] : c.constants)
        out << fmt::format("c[{}] = {}\n", basis_name(shell), value.get_str());
    if (!c.ok)
        out << fmt::format("not spherical: fails at {}\n", basis_name(*c.failing_shell));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Equivariant embeddings of trees into hyperbolic space"};
    app.require_subcommand(1);

    std::string tree_source = "regular:3,4";
    std::string lambda_text = "1.25";
    int depth = -1;
    std::string backend = "float";
    std::string out_path;
    std::string format = "json";
    std::string base;
    auto* embed = app.add_subcommand("embed", "Coordinates of the embedded vertices and their cosh table");
    embed->add_option("--tree", tree_source, "regular:q,depth or an edge-list file");
    embed->add_option("--lambda", lambda_text, "Scale parameter, must exceed 1");
    embed->add_option("--depth", depth, "Truncation depth (defaults to the tree depth)");
    embed->add_option("--backend", backend)->check(CLI::IsMember({"float", "exact"}));
    embed->add_option("--out", out_path, "Output file (stdout when omitted)");
    embed->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    embed->add_option("--base", base, "Base vertex of a file tree");

    std::string suite = "all";
    SuiteOptions sopts;
    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    verify->add_option("--suite", suite)->check(
        CLI::IsMember({"quad", "hymodel", "lorentz", "embed", "elementary", "gelfand", "all"}));
    verify->add_option("--lambda", sopts.lambda);
    verify->add_option("--depth", sopts.depth);
    verify->add_option("--valence", sopts.valence);
    verify->add_option("--seed", sopts.seed);
    std::string recheck_path;
    verify->add_option("--in", recheck_path, "Re-verify an embed JSON output instead of running a suite");

    std::string matrix_path;
    auto* classify_cmd = app.add_subcommand("classify", "Classify a Lorentz isometry");
    classify_cmd->add_option("--matrix", matrix_path)->required();

    int valence = 3;
    int max_shell = 3;
    auto* spherical = app.add_subcommand("spherical", "Convolution table and spherical constants");
    spherical->add_option("--valence", valence);
    spherical->add_option("--max-shell", max_shell);

    std::string in_path;
    bool poincare = false;
    auto* project = app.add_subcommand("project", "Poincare disk coordinates of an embed output");
    project->add_flag("--poincare", poincare, "Disk model (the only projection offered)");
    project->add_option("--in", in_path, "embed JSON (stdin when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }

    try {
        if (*embed) {
            TreeSource src = load_tree(tree_source, base);
            int d = depth < 0 ? src.depth : depth;
            if (d < src.depth)
                throw DepthExceeded(fmt::format("depth {} is below the tree depth {}", d, src.depth));
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file)
                    throw InvalidInput("cannot write '" + out_path + "'");
            }
            std::ostream& out = out_path.empty() ? std::cout : file;
            if (backend == "exact")
                return run_embed<mpq_class>(src, parse_rational(lambda_text), d, format, out);
            return run_embed<double>(src, parse_double(lambda_text), d, format, out);
        }
        if (*verify) {
            if (!recheck_path.empty()) {
                std::ifstream file(recheck_path);
                if (!file)
                    throw InvalidInput("cannot open '" + recheck_path + "'");
                return run_recheck(file, std::cout);
            }
            auto results = run_suite(suite, sopts);
            double worst = 0.0;
            int failures = 0;
            for (const auto& r : results) {
                std::cout << format_check(r) << '\n';
                if (!r.exact)
                    worst = std::max(worst, r.residual);
                if (!r.ok)
                    ++failures;
            }
            std::cout << fmt::format("max residual {:.3e}; {} of {} checks passed\n", worst,
                                     results.size() - static_cast<std::size_t>(failures), results.size());
            for (const auto& r : results)
                if (!r.ok)
                    std::cerr << "failed: " << r.name << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
            return failures ? check_failed : ok;
        }
        if (*classify_cmd) {
            std::ifstream file(matrix_path);
            if (!file)
                throw InvalidInput("cannot open '" + matrix_path + "'");
            LorentzOp op = read_matrix(file);
            auto orth = is_orthogonal(op);
            if (!orth.ok) {
                std::cout << fmt::format("not orthogonal, residual {:.3e}\n", orth.residual);
                return not_orthogonal;
            }
            IsomClass c = classify(op);
            if (c.type == IsomType::hyperbolic)
                std::cout << fmt::format("hyperbolic, length {:.12f}\n", std::log(std::fabs(c.eigenvalue)));
            else
                std::cout << to_string(c.type) << '\n';
            return ok;
        }
        if (*spherical) {
            print_spherical(valence, max_shell, std::cout);
            return ok;
        }
        if (*project) {
            if (!poincare)
                throw InvalidInput("only --poincare projection is available");
            if (in_path.empty())
                return run_project(std::cin, std::cout, std::cerr);
            std::ifstream file(in_path);
            if (!file)
                throw InvalidInput("cannot open '" + in_path + "'");
            return run_project(file, std::cout, std::cerr);
        }
    } catch (const NotOrthogonal& e) {
        std::cerr << e.what() << fmt::format(" (residual {:.3e})\n", e.residual());
        return not_orthogonal;
    } catch (const PreconditionFailed& e) {
        std::cerr << e.what() << '\n';
        return constraint;
    } catch (const DepthExceeded& e) {
        std::cerr << e.what() << '\n';
        return constraint;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return bad_input;
    }
    return ok;
}
