#include "willab/wsd_io.hpp"

#include "willab/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace willab {

namespace {

constexpr int kFormatVersion = 1;

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_poly(std::ostream& os, const char* tag, const Poly& p) {
    const auto& c = p.coeffs();
    os << tag << ' ' << c.size() << '\n';
    for (const auto& a : c) os << ' ' << num17(a.real()) << ' ' << num17(a.imag()) << '\n';
}

Poly read_poly(std::istream& is, const std::string& tag) {
    std::string word;
    size_t n = 0;
    if (!(is >> word) || word != tag) throw Error("wsd: expected '" + tag + "' field");
    if (!(is >> n)) throw Error("wsd: bad coefficient count for " + tag);
    std::vector<cdouble> c(n);
    for (size_t i = 0; i < n; ++i) {
        double re, im;
        if (!(is >> re >> im)) throw Error("wsd: truncated coefficient list");
        c[i] = cdouble(re, im);
    }
    Poly p(std::move(c));
    return p;
}

} // namespace

void write_wsd(std::ostream& os, const NullCurveData& data) {
    os << "wsd " << kFormatVersion << '\n';
    if (data.symmetry_order)
        os << "p " << *data.symmetry_order << '\n';
    else
        os << "p -\n";
    for (int k = 0; k < 3; ++k) {
        os << "component " << (k + 1) << '\n';
        write_poly(os, "numerator", data.phi[size_t(k)].numerator());
        write_poly(os, "denominator", data.phi[size_t(k)].denominator());
    }
    os << "basepoint " << num17(data.basepoint.real()) << ' ' << num17(data.basepoint.imag())
       << '\n';
    os << "provenance " << (data.provenance.empty() ? "-" : data.provenance) << '\n';
}

void write_wsd_file(const std::string& path, const NullCurveData& data) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    write_wsd(f, data);
}

NullCurveData read_wsd(std::istream& is) {
    std::string word;
    int version = -1;
    if (!(is >> word) || word != "wsd" || !(is >> version))
        throw Error("wsd: missing header");
    if (version != kFormatVersion)
        throw Error("wsd: unknown format version " + std::to_string(version));
    NullCurveData data;
    if (!(is >> word) || word != "p") throw Error("wsd: expected 'p' field");
    std::string pv;
    is >> pv;
    if (pv != "-") data.symmetry_order = std::stoi(pv);
    for (int k = 0; k < 3; ++k) {
        int idx = 0;
        if (!(is >> word) || word != "component" || !(is >> idx) || idx != k + 1)
            throw Error("wsd: expected component " + std::to_string(k + 1));
        Poly num = read_poly(is, "numerator");
        Poly den = read_poly(is, "denominator");
        data.phi[size_t(k)] = RationalFn(std::move(num), std::move(den));
    }
    if (!(is >> word) || word != "basepoint") throw Error("wsd: expected basepoint");
    double re, im;
    if (!(is >> re >> im)) throw Error("wsd: bad basepoint");
    data.basepoint = cdouble(re, im);
    if (!(is >> word) || word != "provenance") throw Error("wsd: expected provenance");
    std::string rest;
    std::getline(is, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
    data.provenance = (rest == "-") ? "" : rest;

    for (int k = 0; k < 3; ++k) {
        auto anti = data.phi[size_t(k)].antiderivative();
        if (!anti)
            throw LogEndDetected("wsd: component residues prevent a rational primitive");
        data.primitive[size_t(k)] = *anti;
    }
    return data;
}

NullCurveData read_wsd_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    return read_wsd(f);
}

} // namespace willab
