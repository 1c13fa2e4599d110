#include "perc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace perc {

std::uint64_t bernoulli_threshold(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie strictly inside (0,1)");
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;  // 2^64
    if (scaled >= 18446744073709551615.0L) return ~std::uint64_t{0};
    if (scaled <= 1.0L) return 1;
    return static_cast<std::uint64_t>(scaled);
}

Configuration::Configuration(const BoxSpec& box, bool all_open) : box_(box) {
    const std::size_t nwords = static_cast<std::size_t>((box.volume() + 63) / 64);
    words_.assign(nwords, all_open ? ~std::uint64_t{0} : 0);
    if (all_open && box.volume() % 64 != 0) {
        words_.back() = (~std::uint64_t{0}) >> (64 - box.volume() % 64);
    }
}

Configuration Configuration::sample(const BoxSpec& box, double p, const SeedSpec& seed,
                                    std::uint64_t sample_index, std::uint64_t stream_tag) {
    const std::uint64_t threshold = bernoulli_threshold(p);
    const std::uint64_t key = stream_key(seed, stream_tag, sample_index);
    Configuration config(box);
    const std::int64_t volume = box.volume();
    std::uint64_t word = 0;
    for (std::int64_t i = 0; i < volume; ++i) {
        word |= static_cast<std::uint64_t>(bernoulli_bit(key, static_cast<std::uint64_t>(i), threshold)) << (i & 63);
        if ((i & 63) == 63) {
            config.words_[static_cast<std::size_t>(i >> 6)] = word;
            word = 0;
        }
    }
    if (volume % 64 != 0) config.words_.back() = word;
    config.seed_ = SeedRecord{SeedRecord::Kind::sampled, seed.global_seed, stream_tag, sample_index};
    return config;
}

void Configuration::set_open(std::int64_t index, bool value) {
    if (index < 0 || index >= box_.volume()) throw std::out_of_range("site index out of range");
    std::uint64_t& w = words_[static_cast<std::size_t>(index >> 6)];
    const std::uint64_t bit = std::uint64_t{1} << (index & 63);
    if (value)
        w |= bit;
    else
        w &= ~bit;
}

void Configuration::flip(std::int64_t index) {
    words_[static_cast<std::size_t>(index >> 6)] ^= std::uint64_t{1} << (index & 63);
}

std::int64_t Configuration::open_count() const {
    std::int64_t n = 0;
    for (std::uint64_t w : words_) n += __builtin_popcountll(w);
    return n;
}

std::uint64_t Configuration::digest() const {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(box_.dim()) * kGolden + static_cast<std::uint64_t>(box_.radius()));
    for (int i = 0; i < box_.dim(); ++i) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(box_.center()[i])));
    for (std::uint64_t w : words_) h = mix64(h ^ w);
    return h;
}

PartialConfiguration::PartialConfiguration(const BoxSpec& parent, std::vector<std::int64_t> sorted_sites,
                                           std::vector<std::uint8_t> open)
    : parent_(parent), sites_(std::move(sorted_sites)), open_(std::move(open)) {
    if (sites_.size() != open_.size()) throw std::invalid_argument("site/status length mismatch");
    if (!std::is_sorted(sites_.begin(), sites_.end())) throw std::invalid_argument("partial configuration sites must be sorted");
}

PartialConfiguration PartialConfiguration::restrict_to(const Configuration& config, const std::vector<Point>& region) {
    std::vector<std::int64_t> sites;
    sites.reserve(region.size());
    for (const Point& p : region) {
        if (!config.box().contains(p)) throw std::invalid_argument("region site " + to_string(p, config.box().dim()) + " is outside the box");
        sites.push_back(config.box().index_of(p));
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    std::vector<std::uint8_t> open;
    open.reserve(sites.size());
    for (std::int64_t s : sites) open.push_back(config.open(s) ? 1 : 0);
    return PartialConfiguration(config.box(), std::move(sites), std::move(open));
}

bool PartialConfiguration::covers(std::int64_t parent_index) const {
    return std::binary_search(sites_.begin(), sites_.end(), parent_index);
}

bool PartialConfiguration::open_at(std::int64_t parent_index) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), parent_index);
    if (it == sites_.end() || *it != parent_index) throw std::out_of_range("site not covered by the partial configuration");
    return open_[static_cast<std::size_t>(it - sites_.begin())] != 0;
}

std::int64_t PartialConfiguration::open_count() const {
    std::int64_t n = 0;
    for (std::uint8_t b : open_) n += b;
    return n;
}

PartialConfiguration restrict_region(const Configuration& config, const std::vector<Point>& region) {
    return PartialConfiguration::restrict_to(config, region);
}

Configuration restrict_to_box(const Configuration& config, const BoxSpec& sub) {
    Configuration out(sub);
    for (SiteCursor it(sub); it.valid(); it.advance()) {
        if (!config.box().contains(it.point()))
            throw std::invalid_argument("sub-box is not contained in the configuration's box");
        out.set_open(it.index(), config.open(it.point()));
    }
    return out;
}

namespace {

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
}

template <class T>
T take(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::invalid_argument("truncated configuration blob");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
    pos += sizeof(T);
    return static_cast<T>(v);
}

constexpr char kMagic[8] = {'P', 'E', 'R', 'C', 'C', 'F', 'G', '1'};

}  // namespace

std::vector<std::uint8_t> serialize(const Configuration& config) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 8);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(config.box().dim()));
    for (int i = 0; i < config.box().dim(); ++i) put<std::int32_t>(out, config.box().center()[i]);
    put<std::int32_t>(out, config.box().radius());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(config.seed_record().kind));
    put<std::uint64_t>(out, config.seed_record().global_seed);
    put<std::uint64_t>(out, config.seed_record().stream_tag);
    put<std::uint64_t>(out, config.seed_record().sample_index);
    const std::int64_t volume = config.volume();
    for (std::int64_t byte = 0; byte * 8 < volume; ++byte) {
        std::uint8_t b = 0;
        for (int bit = 0; bit < 8 && byte * 8 + bit < volume; ++bit) b |= static_cast<std::uint8_t>(config.open(byte * 8 + bit)) << bit;
        out.push_back(b);
    }
    return out;
}

Configuration deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw std::invalid_argument("not a configuration blob");
    std::size_t pos = 8;
    const int dim = take<std::uint8_t>(bytes, pos);
    Point center;
    for (int i = 0; i < dim; ++i) center[i] = take<std::int32_t>(bytes, pos);
    const std::int32_t radius = take<std::int32_t>(bytes, pos);
    SeedRecord seed;
    seed.kind = static_cast<SeedRecord::Kind>(take<std::uint8_t>(bytes, pos));
    seed.global_seed = take<std::uint64_t>(bytes, pos);
    seed.stream_tag = take<std::uint64_t>(bytes, pos);
    seed.sample_index = take<std::uint64_t>(bytes, pos);
    Configuration config(BoxSpec(dim, center, radius));
    const std::int64_t volume = config.volume();
    if (bytes.size() - pos != static_cast<std::size_t>((volume + 7) / 8)) throw std::invalid_argument("configuration payload has the wrong length");
    for (std::int64_t i = 0; i < volume; ++i) {
        const std::uint8_t b = bytes[pos + static_cast<std::size_t>(i / 8)];
        config.set_open(i, (b >> (i % 8)) & 1);
    }
    config.set_seed_record(seed);
    return config;
}

std::string grid_dump(const Configuration& config) {
    if (config.box().dim() != 2) throw std::invalid_argument("grid dump is only available for d=2");
    std::ostringstream out;
    const BoxSpec& box = config.box();
    for (std::int32_t y = box.hi(1); y >= box.lo(1); --y) {
        for (std::int32_t x = box.lo(0); x <= box.hi(0); ++x) {
            out << (config.open(Point{x, y}) ? '#' : '.');
        }
        out << '\n';
    }
    return out.str();
}

ConfigBuilder::ConfigBuilder(const BoxSpec& box, bool all_open) : config_(box, all_open) {}

ConfigBuilder& ConfigBuilder::set(const Point& p, bool open) {
    config_.set_open(p, open);
    return *this;
}

ConfigBuilder& ConfigBuilder::open_segment(const Point& a, const Point& b) {
    int axis = -1;
    for (int i = 0; i < config_.box().dim(); ++i) {
        if (a[i] != b[i]) {
            if (axis >= 0) throw std::invalid_argument("segment endpoints differ in more than one coordinate");
            axis = i;
        }
    }
    if (axis < 0) {
        set(a);
        return *this;
    }
    const std::int32_t from = std::min(a[axis], b[axis]);
    const std::int32_t to = std::max(a[axis], b[axis]);
    Point p = a;
    for (std::int32_t c = from; c <= to; ++c) {
        p[axis] = c;
        set(p);
    }
    return *this;
}

}  // namespace perc
