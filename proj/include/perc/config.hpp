#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/rng.hpp"

namespace perc {

// How a configuration came to be. Sampled configurations can be regenerated
// bit for bit from this record; hand-built ones are marked constructed.
struct SeedRecord {
    enum class Kind : std::uint8_t { constructed = 0, sampled = 1 };
    Kind kind = Kind::constructed;
    std::uint64_t global_seed = 0;
    std::uint64_t stream_tag = 0;
    std::uint64_t sample_index = 0;

    friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

// Open/closed status of every site of a box, bit-packed in site-index order.
class Configuration {
public:
    explicit Configuration(const BoxSpec& box, bool all_open = false);

    // Bernoulli(p) product measure on the box. Deterministic in all
    // arguments; independent of worker count and sampling order.
    static Configuration sample(const BoxSpec& box, double p, const SeedSpec& seed,
                                std::uint64_t sample_index, std::uint64_t stream_tag = 0);

    const BoxSpec& box() const { return box_; }
    const SeedRecord& seed_record() const { return seed_; }
    std::int64_t volume() const { return box_.volume(); }

    bool open(std::int64_t index) const {
        return (words_[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1u;
    }
    bool open(const Point& p) const { return open(box_.index_of(p)); }

    void set_open(std::int64_t index, bool value);
    void set_open(const Point& p, bool value) { set_open(box_.index_of(p), value); }
    void flip(std::int64_t index);

    // Used by deserialization to reattach the stored provenance.
    void set_seed_record(const SeedRecord& record) { seed_ = record; }

    std::int64_t open_count() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

    // Stable 64-bit digest of (box, bits); used by reproducibility checks.
    std::uint64_t digest() const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    BoxSpec box_;
    SeedRecord seed_;
    std::vector<std::uint64_t> words_;
};

// Statuses on a subset of a box's sites (for example an annulus), used when
// conditioning on part of the configuration.
class PartialConfiguration {
public:
    PartialConfiguration(const BoxSpec& parent, std::vector<std::int64_t> sorted_sites,
                         std::vector<std::uint8_t> open);

    static PartialConfiguration restrict_to(const Configuration& config, const std::vector<Point>& region);

    const BoxSpec& parent_box() const { return parent_; }
    const std::vector<std::int64_t>& sites() const { return sites_; }
    std::size_t size() const { return sites_.size(); }

    bool covers(std::int64_t parent_index) const;
    bool open_at(std::int64_t parent_index) const;  // throws if not covered
    std::int64_t open_count() const;

private:
    BoxSpec parent_;
    std::vector<std::int64_t> sites_;   // ascending parent indices
    std::vector<std::uint8_t> open_;
};

// restrict() as an operation: statuses on region only.
PartialConfiguration restrict_region(const Configuration& config, const std::vector<Point>& region);

// Copy of the statuses of a sub-box as a standalone configuration
// (the "configuration restricted to" a smaller box).
Configuration restrict_to_box(const Configuration& config, const BoxSpec& sub);

// Binary layout: magic "PERCCFG1", u8 dim, i32 center[dim], i32 radius,
// u8 seed kind, u64 seed, u64 tag, u64 sample, then ceil(volume/8) payload
// bytes, little-endian (site index 8*j + i maps to bit i of byte j).
std::vector<std::uint8_t> serialize(const Configuration& config);
Configuration deserialize(const std::vector<std::uint8_t>& bytes);

// Textual grid for d=2 debugging: rows from highest y to lowest,
// '#' = open, '.' = closed.
std::string grid_dump(const Configuration& config);

// Small helper for constructing explicit test configurations
// (straight columns, rays, hand-placed sites).
class ConfigBuilder {
public:
    explicit ConfigBuilder(const BoxSpec& box, bool all_open = false);

    ConfigBuilder& set(const Point& p, bool open = true);
    // Opens every site on the axis-aligned segment from a to b (inclusive);
    // a and b must differ in at most one coordinate.
    ConfigBuilder& open_segment(const Point& a, const Point& b);

    Configuration build() const { return config_; }

private:
    Configuration config_;
};

}  // namespace perc
