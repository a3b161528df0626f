#pragma once

#include <filesystem>
#include <string>

#include "geometry/profile.hpp"
#include "io/toml.hpp"
#include "sphere/field.hpp"

namespace nullfol::io {

// profile keys under prefix: epsilon, seed, band, powers and one array of
// coefficient rows (one row per power of us/r0) for each channel
void put_profile(Config& cfg, const std::string& prefix, const geometry::PerturbationProfile& p);
geometry::PerturbationProfile get_profile(const Config& cfg, const std::string& prefix);
void save_profile(const std::filesystem::path& path, const geometry::PerturbationProfile& p);
geometry::PerturbationProfile load_profile(const std::filesystem::path& path);

// snapshot exports: (theta, phi, value) per node and (l, m, coeff) up to band
void write_field_values(const std::filesystem::path& path, const sphere::ScalarField& f);
void write_field_coeffs(const std::filesystem::path& path, const sphere::ScalarField& f, int band);
// coefficients from an (l, m, coeff) table; missing entries are zero
sphere::ScalarField read_field_coeffs(const std::filesystem::path& path, const sphere::GridPtr& grid);

}  // namespace nullfol::io
