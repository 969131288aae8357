#include <tschief/io.hpp>

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

namespace tschief {

  namespace {

    constexpr char magic[4] = {'T', 'S', 'C', 'F'};
    constexpr char end_magic[4] = {'F', 'C', 'S', 'T'};

    class BinaryWriter {
    public:
      explicit BinaryWriter(std::ostream& out) : out_(out) {}

      void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

      template<typename U>
      void uint(U value) {
        char buf[sizeof(U)];
        for (std::size_t i = 0; i < sizeof(U); ++i) { buf[i] = static_cast<char>((value >> (8 * i)) & 0xff); }
        bytes(buf, sizeof(U));
      }

      void u8(std::uint8_t v) { uint(v); }
      void u16(std::uint16_t v) { uint(v); }
      void u32(std::uint32_t v) { uint(v); }
      void u64(std::uint64_t v) { uint(v); }
      void i64(std::int64_t v) { uint(static_cast<std::uint64_t>(v)); }
      void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
      void size(std::size_t v) { u64(v); }

    private:
      std::ostream& out_;
    };

    class BinaryReader {
    public:
      explicit BinaryReader(std::istream& in) : in_(in) {}

      void bytes(char* data, std::size_t n) {
        in_.read(data, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) { throw Error("model file is truncated"); }
      }

      template<typename U>
      U uint() {
        unsigned char buf[sizeof(U)];
        bytes(reinterpret_cast<char*>(buf), sizeof(U));
        U value = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) { value |= static_cast<U>(static_cast<U>(buf[i]) << (8 * i)); }
        return value;
      }

      std::uint8_t u8() { return uint<std::uint8_t>(); }
      std::uint16_t u16() { return uint<std::uint16_t>(); }
      std::uint32_t u32() { return uint<std::uint32_t>(); }
      std::uint64_t u64() { return uint<std::uint64_t>(); }
      std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
      double f64() { return std::bit_cast<double>(u64()); }

      /// Count bounded by `limit`, guarding against absurd allocations from corrupt files.
      std::size_t count(std::size_t limit, const char* what) {
        const auto v = u64();
        if (v > limit) { throw Error(std::string("model file has an invalid ") + what); }
        return static_cast<std::size_t>(v);
      }

      bool flag() {
        const auto v = u8();
        if (v > 1) { throw Error("model file has an invalid flag byte"); }
        return v == 1;
      }

    private:
      std::istream& in_;
    };

    constexpr std::size_t max_count = std::size_t{1} << 32;

    void write_optional(BinaryWriter& w, const std::optional<double>& v) {
      w.u8(v ? 1 : 0);
      if (v) { w.f64(*v); }
    }

    std::optional<double> read_optional(BinaryReader& r) {
      if (!r.flag()) { return std::nullopt; }
      return r.f64();
    }

    void write_measure(BinaryWriter& w, const ParameterizedMeasure& m) {
      w.u8(static_cast<std::uint8_t>(m.kind));
      w.u8(m.window ? 1 : 0);
      if (m.window) { w.size(*m.window); }
      write_optional(w, m.g);
      write_optional(w, m.epsilon);
      write_optional(w, m.gap_value);
      write_optional(w, m.cost);
      write_optional(w, m.nu);
      write_optional(w, m.lambda);
    }

    ParameterizedMeasure read_measure(BinaryReader& r) {
      ParameterizedMeasure m;
      const auto kind = r.u8();
      if (kind >= measure_kind_count) { throw Error("model file has an unknown measure kind"); }
      m.kind = static_cast<MeasureKind>(kind);
      if (r.flag()) { m.window = static_cast<std::size_t>(r.u64()); }
      m.g = read_optional(r);
      m.epsilon = read_optional(r);
      m.gap_value = read_optional(r);
      m.cost = read_optional(r);
      m.nu = read_optional(r);
      m.lambda = read_optional(r);
      return m;
    }

    void write_tree(BinaryWriter& w, const Tree& tree) {
      w.size(tree.series_length);
      w.size(tree.nodes.size());
      for (const auto& node : tree.nodes) {
        if (const auto* leaf = std::get_if<Leaf>(&node)) {
          w.u8(0);
          w.u32(leaf->label);
          w.u8(leaf->forced ? 1 : 0);
          continue;
        }
        const auto& in = std::get<Internal>(node);
        w.u8(1);
        w.u32(in.fallback_label);
        w.size(in.branches.size());
        for (auto b : in.branches) { w.u32(static_cast<std::uint32_t>(b)); }
        w.u8(static_cast<std::uint8_t>(in.splitter.index()));
        if (const auto* s = std::get_if<SimilaritySplitter>(&in.splitter)) {
          write_measure(w, s->measure);
          w.size(s->exemplars.size());
          for (const auto& e : s->exemplars) {
            w.size(e.length());
            for (double v : e.values()) { w.f64(v); }
          }
        } else if (const auto* d = std::get_if<DictionarySplitter>(&in.splitter)) {
          w.size(d->transform_index);
          w.size(d->exemplars.size());
          for (const auto& h : d->exemplars) {
            w.size(h.size());
            for (const auto& wc : h.view()) {
              w.u32(wc.word);
              w.u32(wc.count);
            }
          }
        } else {
          const auto& iv = std::get<IntervalSplitter>(in.splitter);
          w.size(iv.interval.start);
          w.size(iv.interval.length);
          w.u8(static_cast<std::uint8_t>(iv.kind));
          w.size(iv.attribute);
          w.f64(iv.threshold);
        }
      }
    }

    Tree read_tree(BinaryReader& r, std::size_t series_length, std::size_t class_count, std::size_t pool_size) {
      Tree tree;
      tree.series_length = r.count(max_count, "tree series length");
      if (tree.series_length != series_length) { throw Error("model file tree length differs from the forest"); }
      const std::size_t node_count = r.count(max_count, "node count");
      if (node_count == 0) { throw Error("model file holds an empty tree"); }
      auto check_label = [&](Label l) {
        if (l >= class_count) { throw Error("model file has a class index out of range"); }
        return l;
      };
      for (std::size_t id = 0; id < node_count; ++id) {
        const auto tag = r.u8();
        if (tag == 0) {
          Leaf leaf;
          leaf.label = check_label(r.u32());
          leaf.forced = r.flag();
          tree.nodes.emplace_back(leaf);
          continue;
        }
        if (tag != 1) { throw Error("model file has an unknown node tag"); }
        Internal in;
        in.fallback_label = check_label(r.u32());
        const std::size_t branches = r.count(max_count, "branch count");
        for (std::size_t b = 0; b < branches; ++b) {
          const auto child = static_cast<std::int32_t>(r.u32());
          if (child != dropped_branch
              && (child <= static_cast<std::int64_t>(id) || static_cast<std::size_t>(child) >= node_count)) {
            throw Error("model file has a child id out of range");
          }
          in.branches.push_back(child);
        }
        const auto splitter_tag = r.u8();
        if (splitter_tag == 0) {
          SimilaritySplitter s;
          s.measure = read_measure(r);
          const std::size_t exemplars = r.count(max_count, "exemplar count");
          for (std::size_t e = 0; e < exemplars; ++e) {
            const std::size_t len = r.count(max_count, "exemplar length");
            if (len != series_length) { throw Error("model file exemplar length differs from the forest"); }
            std::vector<double> values(len);
            for (auto& v : values) { v = r.f64(); }
            s.exemplars.emplace_back(std::move(values));
          }
          in.splitter = std::move(s);
        } else if (splitter_tag == 1) {
          DictionarySplitter d;
          d.transform_index = r.count(max_count, "transform index");
          if (d.transform_index >= pool_size) { throw Error("model file refers to a missing BOSS transform"); }
          const std::size_t exemplars = r.count(max_count, "exemplar count");
          for (std::size_t e = 0; e < exemplars; ++e) {
            const std::size_t entries = r.count(max_count, "histogram size");
            std::vector<WordCount> counts;
            for (std::size_t j = 0; j < entries; ++j) {
              const auto word = r.u32();
              const auto count = r.u32();
              counts.push_back({word, count});
            }
            d.exemplars.push_back(WordHistogram::from_entries(std::move(counts)));
          }
          in.splitter = std::move(d);
        } else if (splitter_tag == 2) {
          IntervalSplitter iv;
          iv.interval.start = r.count(max_count, "interval start");
          iv.interval.length = r.count(max_count, "interval length");
          if (iv.interval.length < min_interval_length || iv.interval.start + iv.interval.length > series_length) {
            throw Error("model file has an interval outside the series");
          }
          const auto kind = r.u8();
          if (kind >= all_transform_kinds.size()) { throw Error("model file has an unknown interval transform"); }
          iv.kind = static_cast<TransformKind>(kind);
          iv.attribute = r.count(max_count, "attribute");
          if (iv.attribute >= transformed_length(iv.interval.length, iv.kind)) {
            throw Error("model file has an attribute out of range");
          }
          iv.threshold = r.f64();
          in.splitter = iv;
        } else {
          throw Error("model file has an unknown splitter tag");
        }
        if (branch_count(in.splitter) != in.branches.size() || in.branches.size() < 2) {
          throw Error("model file splitter and branch count disagree");
        }
        tree.nodes.emplace_back(std::move(in));
      }
      return tree;
    }

  } // namespace

  void save_model(const Forest& forest, std::ostream& out) {
    BinaryWriter w(out);
    w.bytes(magic, sizeof magic);
    w.u16(model_format_version);
    const auto& c = forest.config();
    w.size(c.k);
    w.size(c.t);
    w.size(c.Ce);
    w.size(c.Cb);
    w.size(c.Cr);
    w.u64(c.seed);
    w.size(c.threads);
    w.u8(c.audit ? 1 : 0);
    w.size(forest.series_length());
    w.size(forest.class_count());
    w.size(forest.label_names().size());
    for (auto l : forest.label_names()) { w.i64(l); }

    w.size(forest.boss_pool().size());
    for (const auto& t : forest.boss_pool()) {
      const auto& p = t.params();
      w.size(p.window);
      w.size(p.word_length);
      w.size(p.alphabet);
      w.u8(p.norm ? 1 : 0);
      w.size(t.mcb().positions());
      for (const auto& row : t.mcb().boundaries) {
        w.size(row.size());
        for (double b : row) { w.f64(b); }
      }
    }

    w.size(forest.trees().size());
    for (const auto& tree : forest.trees()) { write_tree(w, tree); }
    w.bytes(end_magic, sizeof end_magic);
    if (!out) { throw Error("failed to write model"); }
  }

  void save_model(const Forest& forest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) { throw Error("cannot open " + path.string() + " for writing"); }
    save_model(forest, out);
    out.close();
    if (!out) { throw Error("failed to write model to " + path.string()); }
  }

  Forest load_model(std::istream& in) {
    BinaryReader r(in);
    char head[4];
    in.read(head, sizeof head);
    if (in.gcount() != sizeof head || !std::equal(head, head + 4, magic)) { throw Error("not a model file"); }
    const auto version = r.u16();
    if (version != model_format_version) {
      throw Error("unsupported model format version " + std::to_string(version) + " (expected "
                  + std::to_string(model_format_version) + ")");
    }
    ForestConfig c;
    c.k = r.count(max_count, "tree count");
    c.t = r.count(max_count, "pool size");
    c.Ce = r.count(max_count, "Ce");
    c.Cb = r.count(max_count, "Cb");
    c.Cr = r.count(max_count, "Cr");
    c.seed = r.u64();
    c.threads = r.count(max_count, "thread count");
    c.audit = r.flag();
    const std::size_t series_length = r.count(max_count, "series length");
    const std::size_t class_count = r.count(max_count, "class count");
    if (series_length < 2 || class_count == 0) { throw Error("model file has an invalid header"); }
    const std::size_t names = r.count(max_count, "label count");
    if (names != 0 && names != class_count) { throw Error("model file label names do not match the class count"); }
    std::vector<std::int64_t> label_names(names);
    for (auto& l : label_names) { l = r.i64(); }

    const std::size_t pool_size = r.count(max_count, "pool size");
    std::vector<BossTransform> pool;
    for (std::size_t i = 0; i < pool_size; ++i) {
      BossParams p;
      p.window = r.count(max_count, "BOSS window");
      p.word_length = r.count(max_count, "BOSS word length");
      p.alphabet = r.count(max_count, "BOSS alphabet");
      p.norm = r.flag();
      validate(p, series_length);
      MCBTable mcb;
      const std::size_t positions = r.count(max_count, "MCB size");
      for (std::size_t j = 0; j < positions; ++j) {
        std::vector<double> row(r.count(max_count, "MCB row"));
        for (auto& b : row) { b = r.f64(); }
        mcb.boundaries.push_back(std::move(row));
      }
      pool.emplace_back(p, std::move(mcb));
    }

    const std::size_t tree_count = r.count(max_count, "tree count");
    if (tree_count != c.k) { throw Error("model file tree count differs from k"); }
    std::vector<Tree> trees;
    for (std::size_t i = 0; i < tree_count; ++i) { trees.push_back(read_tree(r, series_length, class_count, pool_size)); }
    char tail[4];
    r.bytes(tail, sizeof tail);
    if (!std::equal(tail, tail + 4, end_magic)) { throw Error("model file is corrupt: bad end marker"); }

    try {
      Forest forest(c, series_length, class_count, std::move(pool), std::move(trees));
      forest.set_label_names(std::move(label_names));
      return forest;
    } catch (const ConfigError& e) {
      throw Error(std::string("model file holds an invalid config: ") + e.what());
    }
  }

  Forest load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!std::filesystem::is_regular_file(path) || !in) { throw Error("file not found: " + path.string()); }
    return load_model(in);
  }

} // namespace tschief
