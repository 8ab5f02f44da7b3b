#pragma once

#include <string>
#include <vector>

#include "oqbm/field.hpp"
#include "oqbm/moments.hpp"
#include "oqbm/observables.hpp"
#include "oqbm/phase2d.hpp"

namespace oqbm {

// All floats are written with 17 significant digits so a reread reproduces
// the exact binary values.
std::string format_g17(double v);

// "snap_t{label}.csv" with the label printed compactly (%g).
std::string snapshot_filename(double label);

void write_snapshot_csv(const std::string& path, const WignerField& f);
void write_series_csv(const std::string& path, const TimeSeries& s);

struct DiagnosticsRow {
    double t = 0.0;
    std::size_t peaks = 0;
    double gaussian_residual = 0.0;
};
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows);

// One file per moment order: t plus the four weighted integrals.
void write_moments_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<Vec4>& rows);

void write_elimination_csv(const std::string& path, const std::vector<ElimRow>& rows);

} // namespace oqbm
