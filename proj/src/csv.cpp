#include "oqbm/csv.hpp"

#include <cstdio>
#include <fstream>

#include "oqbm/errors.hpp"

namespace oqbm {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string snapshot_filename(double label) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%g.csv", label);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // '\n' endings on every platform
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

void write_snapshot_csv(const std::string& path, const WignerField& f) {
    std::ofstream out = open_out(path);
    out << "x,W_plus,W_minus,C_R,C_I\n";
    for (std::size_t i = 0; i < f.grid.N; ++i)
        out << format_g17(f.grid.x[i]) << ',' << format_g17(f.wp[i]) << ','
            << format_g17(f.wm[i]) << ',' << format_g17(f.cr[i]) << ','
            << format_g17(f.ci[i]) << '\n';
}

void write_series_csv(const std::string& path, const TimeSeries& s) {
    std::ofstream out = open_out(path);
    out << "t,norm,mean_x,variance,C_I_total,sigma_z\n";
    for (std::size_t i = 0; i < s.t.size(); ++i)
        out << format_g17(s.t[i]) << ',' << format_g17(s.norm[i]) << ','
            << format_g17(s.mean_x[i]) << ',' << format_g17(s.variance[i]) << ','
            << format_g17(s.ci_total[i]) << ',' << format_g17(s.sigma_z[i]) << '\n';
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out = open_out(path);
    out << "t,peaks,gaussian_residual\n";
    for (const DiagnosticsRow& r : rows)
        out << format_g17(r.t) << ',' << r.peaks << ',' << format_g17(r.gaussian_residual)
            << '\n';
}

void write_moments_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<Vec4>& rows) {
    if (t.size() != rows.size())
        throw std::invalid_argument("write_moments_csv: time and row counts differ");
    std::ofstream out = open_out(path);
    out << "t,xnW_plus,xnW_minus,xnC_R,xnC_I\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << format_g17(t[i]) << ',' << format_g17(rows[i][0]) << ','
            << format_g17(rows[i][1]) << ',' << format_g17(rows[i][2]) << ','
            << format_g17(rows[i][3]) << '\n';
}

void write_elimination_csv(const std::string& path, const std::vector<ElimRow>& rows) {
    std::ofstream out = open_out(path);
    out << "gamma_eff,t,l1_distance\n";
    for (const ElimRow& r : rows)
        out << format_g17(r.gamma_eff) << ',' << format_g17(r.t) << ',' << format_g17(r.l1)
            << '\n';
}

} // namespace oqbm
