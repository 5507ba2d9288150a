#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loadlens {

enum class Dwelling : std::uint8_t { Apartment = 0, House = 1 };

struct HouseholdAttributes {
  std::string meter_id;
  Dwelling dwelling = Dwelling::House;
  int occupants = 1;
  double area_sqm = 0.0;
  double income_dkk = 0.0;
  bool has_ev = false;
  bool has_hp = false;
  std::optional<bool> rural;
  std::optional<int> children;
};

/// The socio-techno-economic grid. Every characteristic is a value list so
/// degenerate schemes (single band per characteristic) enumerate correctly;
/// the defaults reproduce the canonical 2x4x3x3x2x2 grid with the EV+HP
/// exclusion. Band upper bounds are inclusive ("up to" semantics).
struct CategoryScheme {
  std::vector<Dwelling> dwellings = {Dwelling::Apartment, Dwelling::House};
  /// Inclusive upper bounds of the closed occupancy bands; one open band
  /// (lower = last upper + 1) is always appended. {1,2,4} -> P1 P2 P3 P5+.
  std::vector<int> occupancy_uppers = {1, 2, 4};
  std::vector<double> house_area_edges = {110.0, 146.0};
  std::vector<double> apartment_area_edges = {66.0, 85.0};
  std::vector<double> income_edges = {240260.0, 449097.0};
  std::vector<bool> ev_options = {false, true};
  std::vector<bool> hp_options = {false, true};
  bool exclude_ev_and_hp = true;
  int privacy_threshold = 20;

  int occupancy_bands() const {
    return static_cast<int>(occupancy_uppers.size()) + 1;
  }
  int area_bands() const {
    return static_cast<int>(house_area_edges.size()) + 1;
  }
  int income_bands() const {
    return static_cast<int>(income_edges.size()) + 1;
  }

  /// Band label, e.g. "P3" for the 3-4 occupant band, "P5+" for the open one.
  std::string occupancy_label(int band) const;

  /// Throws DomainError unless band edges are strictly increasing and the
  /// house/apartment edge lists agree in length.
  void validate() const;
};

/// Canonical category identity; formats as `<DW>_<P>_<A>_<EUR>_<EV>_<HP>`
/// (with the euro sign), e.g. "H_P3_A3_€3_EV1_HP0".
struct CategoryCode {
  Dwelling dwelling = Dwelling::House;
  std::int8_t occupancy_band = 0;
  std::int8_t area_band = 0;
  std::int8_t income_band = 0;
  bool ev = false;
  bool hp = false;

  auto operator<=>(const CategoryCode&) const = default;
};

std::string format_code(const CategoryCode& code, const CategoryScheme& scheme);
std::optional<CategoryCode> parse_code(std::string_view text,
                                       const CategoryScheme& scheme);

/// Maps a household onto the grid; empty result means the household is
/// excluded by the EV+HP rule.
std::optional<CategoryCode> assign_category(const HouseholdAttributes& attrs,
                                            const CategoryScheme& scheme);

/// All category codes of the scheme minus excluded combinations, in
/// canonical (lexicographic tuple) order.
std::vector<CategoryCode> enumerate_codes(const CategoryScheme& scheme);

struct CategoryEntry {
  std::vector<std::string> members;
  /// Share of members flagged rural, over members carrying the flag.
  std::optional<double> rural_share;
  /// Share per exact occupant count within the band.
  std::map<int, double> occupancy_split;
  /// Share per child count (key 3 aggregates 3 or more).
  std::map<int, double> children_split;

  std::int64_t count() const {
    return static_cast<std::int64_t>(members.size());
  }
};

struct CategoryTable {
  std::map<CategoryCode, CategoryEntry> categories;
  std::vector<std::string> excluded;    // EV+HP households
  std::vector<std::string> suppressed;  // removed by the privacy filter

  std::int64_t total_households() const;
};

/// Partitions households into categories. Throws DomainError on duplicate
/// meter_ids. Optional attribute shares are computed where data is present.
CategoryTable build_category_table(std::span<const HouseholdAttributes> attrs,
                                   const CategoryScheme& scheme);

/// Drops categories with fewer than k members; their members are reported as
/// suppressed, never reassigned. k must be >= 1.
CategoryTable apply_privacy_filter(const CategoryTable& table, int k);

std::string category_table_json(const CategoryTable& table,
                                const CategoryScheme& scheme);

/// Attributes CSV: `meter_id,dwelling,occupants,area_sqm,income_dkk,ev,hp`
/// with optional trailing `rural,children` columns (blank = absent).
/// Throws FormatError on any malformed line.
std::vector<HouseholdAttributes> parse_attributes(std::istream& in);

void write_attributes_csv(std::ostream& out,
                          std::span<const HouseholdAttributes> attrs);

}  // namespace loadlens
