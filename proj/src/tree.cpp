#include <tschief/tree.hpp>

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

namespace tschief {

  namespace {

    constexpr double infinity = std::numeric_limits<double>::infinity();

    std::size_t type_index(SplitterType type) { return static_cast<std::size_t>(type); }

    class Stopwatch {
    public:
      Stopwatch() : start_(std::chrono::steady_clock::now()) {}
      [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      }

    private:
      std::chrono::steady_clock::time_point start_;
    };

    /// Node members grouped by class, ascending class order, only present classes.
    std::vector<std::vector<std::size_t>> group_by_class(const LabeledDataset& data,
                                                         std::span<const std::size_t> node) {
      std::vector<std::vector<std::size_t>> by_class(data.class_count());
      for (std::size_t idx : node) { by_class[data.label(idx)].push_back(idx); }
      std::erase_if(by_class, [](const auto& members) { return members.empty(); });
      return by_class;
    }

    std::vector<std::size_t> draw_exemplars(const std::vector<std::vector<std::size_t>>& by_class, Rng& rng) {
      std::vector<std::size_t> exemplars;
      exemplars.reserve(by_class.size());
      for (const auto& members : by_class) { exemplars.push_back(members[uniform_index(rng, members.size())]); }
      return exemplars;
    }

    /// Nearest exemplar with random tie breaking; `dist(e, cutoff)` gives the distance to exemplar e.
    template<typename DistFn>
    std::uint32_t nearest_random(std::size_t exemplar_count, DistFn&& dist, Rng& rng) {
      double best = infinity;
      std::uint32_t choice = 0;
      std::size_t ties = 0;
      for (std::size_t b = 0; b < exemplar_count; ++b) {
        const double d = dist(b, best);
        if (d < best) {
          best = d;
          choice = static_cast<std::uint32_t>(b);
          ties = 1;
        } else if (d == best) {
          ++ties;
          if (uniform_index(rng, ties) == 0) { choice = static_cast<std::uint32_t>(b); }
        }
      }
      return choice;
    }

    template<typename DistFn>
    std::size_t nearest_first(std::size_t exemplar_count, DistFn&& dist) {
      double best = infinity;
      std::size_t choice = 0;
      for (std::size_t b = 0; b < exemplar_count; ++b) {
        const double d = dist(b, best);
        if (d < best) {
          best = d;
          choice = b;
        }
      }
      return choice;
    }

    /// Running winner of a node's candidate search; exact-equal ginis are tied uniformly at random.
    struct Selection {
      double gini = infinity;
      std::size_t ties = 0;
      SplitterType type = SplitterType::Similarity;
      std::size_t candidate = 0;
      Assignment assignment;
      std::size_t branches = 0;

      void offer(double g, SplitterType t, std::size_t index, Assignment&& a, std::size_t branch_total, Rng& rng) {
        if (g < gini) {
          ties = 1;
        } else if (g == gini) {
          ++ties;
          if (uniform_index(rng, ties) != 0) { return; }
        } else {
          return;
        }
        gini = g;
        type = t;
        candidate = index;
        assignment = std::move(a);
        branches = branch_total;
      }
    };

    struct Evaluated {
      double gini = 0.0;
      bool splittable = false;
    };

    Evaluated evaluate(const LabeledDataset& data, std::span<const std::size_t> node, const Assignment& assignment,
                       std::size_t branches) {
      const auto dists = branch_distributions(data, node, assignment, branches);
      const auto nonempty = std::count_if(dists.begin(), dists.end(), [](const auto& d) { return !d.empty(); });
      return {weighted_gini(node.size(), dists), nonempty >= 2};
    }

  } // namespace

  std::string_view to_string(SplitterType type) {
    switch (type) {
      case SplitterType::Similarity: return "similarity";
      case SplitterType::Dictionary: return "dictionary";
      case SplitterType::Interval: return "interval";
    }
    return "unknown";
  }

  SplitterType type_of(const Splitter& splitter) { return static_cast<SplitterType>(splitter.index()); }

  std::size_t branch_count(const Splitter& splitter) {
    if (const auto* s = std::get_if<SimilaritySplitter>(&splitter)) { return s->exemplars.size(); }
    if (const auto* d = std::get_if<DictionarySplitter>(&splitter)) { return d->exemplars.size(); }
    return 2;
  }

  std::size_t Tree::depth() const {
    if (nodes.empty()) { return 0; }
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      const auto [id, d] = stack.back();
      stack.pop_back();
      deepest = std::max(deepest, d);
      if (const auto* in = std::get_if<Internal>(&nodes[id])) {
        for (auto child : in->branches) {
          if (child != dropped_branch) { stack.emplace_back(static_cast<std::size_t>(child), d + 1); }
        }
      }
    }
    return deepest;
  }

  std::size_t Tree::leaf_count() const {
    return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return std::holds_alternative<Leaf>(n); }));
  }

  std::array<std::size_t, splitter_type_count> Tree::internal_counts() const {
    std::array<std::size_t, splitter_type_count> counts{};
    for (const auto& n : nodes) {
      if (const auto* in = std::get_if<Internal>(&n)) { ++counts[type_index(type_of(in->splitter))]; }
    }
    return counts;
  }

  TrainingContext::TrainingContext(const LabeledDataset& data_, std::span<const BossTransform> pool)
      : data(data_), boss_pool(pool), stats(dataset_stats(data_)) {
    for (const auto& t : pool) {
      if (t.size() != data.size()) { throw Error("BOSS transform does not cover the training set"); }
    }
    derivatives.resize(data.size());
    if (data.series_length() >= 3) {
      for (std::size_t i = 0; i < data.size(); ++i) { derivatives[i] = derivative(data.series(i).values()); }
    }
  }

  std::vector<SimilarityCandidate> generate_similarity_splitters(const TrainingContext& ctx,
                                                                 std::span<const std::size_t> node,
                                                                 std::size_t count, Rng& rng) {
    const auto by_class = group_by_class(ctx.data, node);
    std::vector<SimilarityCandidate> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      SimilarityCandidate c;
      c.measure = sample_measure(rng, ctx.stats);
      while (ctx.stats.length < 3 && uses_derivative(c.measure.kind)) { c.measure = sample_measure(rng, ctx.stats); }
      c.exemplars = draw_exemplars(by_class, rng);
      out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<DictionaryCandidate> generate_dictionary_splitters(const TrainingContext& ctx,
                                                                 std::span<const std::size_t> node,
                                                                 std::size_t count, Rng& rng) {
    if (count == 0) { return {}; }
    if (ctx.boss_pool.empty()) { throw Error("dictionary splitters need a BOSS transform pool"); }
    const auto by_class = group_by_class(ctx.data, node);
    std::vector<DictionaryCandidate> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      DictionaryCandidate c;
      c.transform_index = uniform_index(rng, ctx.boss_pool.size());
      c.exemplars = draw_exemplars(by_class, rng);
      out.push_back(std::move(c));
    }
    return out;
  }

  IntervalPlan interval_plan(std::size_t count) {
    IntervalPlan plan;
    plan.per_transform = count / 4;
    if (plan.per_transform == 0) { return plan; }
    plan.intervals = (plan.per_transform + 15) / 16;
    plan.attributes = plan.per_transform / plan.intervals;
    return plan;
  }

  std::vector<IntervalCandidate> generate_interval_splitters(const TrainingContext& ctx,
                                                             std::span<const std::size_t> node, std::size_t count,
                                                             Rng& rng) {
    const auto plan = interval_plan(count);
    const std::size_t length = ctx.stats.length;
    if (plan.intervals == 0 || length < min_interval_length) { return {}; }
    std::vector<Label> labels;
    labels.reserve(node.size());
    for (std::size_t idx : node) { labels.push_back(ctx.data.label(idx)); }

    std::vector<IntervalCandidate> out;
    std::vector<std::vector<double>> transformed(node.size());
    std::vector<std::size_t> attribute_ids;
    for (std::size_t r = 0; r < plan.intervals; ++r) {
      const Interval iv = sample_interval(rng, length);
      for (TransformKind kind : all_transform_kinds) {
        const std::size_t width = transformed_length(iv.length, kind);
        if (width == 0) { continue; }
        for (std::size_t i = 0; i < node.size(); ++i) {
          transformed[i] = transform_interval(ctx.data.series(node[i]).values(), iv, kind);
        }
        const std::size_t picks = std::min(plan.attributes, width);
        attribute_ids.resize(width);
        std::iota(attribute_ids.begin(), attribute_ids.end(), std::size_t{0});
        for (std::size_t p = 0; p < picks; ++p) {
          std::swap(attribute_ids[p], attribute_ids[p + uniform_index(rng, width - p)]);
        }
        for (std::size_t p = 0; p < picks; ++p) {
          IntervalCandidate c;
          c.interval = iv;
          c.kind = kind;
          c.attribute = attribute_ids[p];
          c.values.resize(node.size());
          for (std::size_t i = 0; i < node.size(); ++i) { c.values[i] = transformed[i][c.attribute]; }
          const auto split = find_best_threshold(c.values, labels, ctx.data.class_count());
          c.threshold = split.threshold;
          c.weighted_gini = split.weighted_gini;
          c.splittable = split.splittable;
          out.push_back(std::move(c));
        }
      }
    }
    return out;
  }

  ThresholdSplit find_best_threshold(std::span<const double> values, std::span<const Label> labels,
                                     std::size_t class_count) {
    const std::size_t n = values.size();
    if (n == 0) { throw Error("empty partition"); }
    if (labels.size() != n) { throw Error("values and labels differ in size"); }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> left(class_count, 0.0);
    std::vector<double> right(class_count, 0.0);
    for (Label l : labels) {
      if (l >= class_count) { throw Error("label out of range"); }
      right[l] += 1.0;
    }
    double sq_left = 0.0;
    double sq_right = 0.0;
    for (double c : right) { sq_right += c * c; }
    const double total = static_cast<double>(n);

    ThresholdSplit best{values[order[0]], 1.0 - sq_right / (total * total), false};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Label l = labels[order[i]];
      sq_left += 2.0 * left[l] + 1.0;
      sq_right -= 2.0 * right[l] - 1.0;
      left[l] += 1.0;
      right[l] -= 1.0;
      const double lo = values[order[i]];
      const double hi = values[order[i + 1]];
      if (!(lo < hi)) { continue; }
      const double nl = static_cast<double>(i + 1);
      const double nr = total - nl;
      const double g = ((nl - sq_left / nl) + (nr - sq_right / nr)) / total;
      if (!best.splittable || g < best.weighted_gini) {
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) { mid = lo; }
        best = {mid, g, true};
      }
    }
    return best;
  }

  Assignment assign(const TrainingContext& ctx, std::span<const std::size_t> node, const SimilarityCandidate& c,
                    Rng& rng) {
    const bool deriv = uses_derivative(c.measure.kind);
    auto view = [&](std::size_t idx) -> std::span<const double> {
      if (deriv) { return ctx.derivatives[idx]; }
      return ctx.data.series(idx).values();
    };
    Assignment out(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::size_t idx = node[i];
      const auto x = view(idx);
      out[i] = nearest_random(
        c.exemplars.size(),
        [&](std::size_t b, double cutoff) {
          const std::size_t e = c.exemplars[b];
          return e == idx ? 0.0 : distance_prepared(c.measure, x, view(e), cutoff);
        },
        rng);
    }
    return out;
  }

  Assignment assign(const TrainingContext& ctx, std::span<const std::size_t> node, const DictionaryCandidate& c,
                    Rng& rng) {
    const auto& transform = ctx.boss_pool[c.transform_index];
    Assignment out(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::size_t idx = node[i];
      const auto h = transform.histogram(idx);
      out[i] = nearest_random(
        c.exemplars.size(),
        [&](std::size_t b, double cutoff) {
          const std::size_t e = c.exemplars[b];
          return e == idx ? 0.0 : boss_dist(h, transform.histogram(e), cutoff);
        },
        rng);
    }
    return out;
  }

  Assignment assign(const IntervalCandidate& c) {
    Assignment out(c.values.size());
    for (std::size_t i = 0; i < c.values.size(); ++i) { out[i] = c.values[i] <= c.threshold ? 0 : 1; }
    return out;
  }

  std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> node, const Assignment& assignment,
                                                  std::size_t branches) {
    if (assignment.size() != node.size()) { throw Error("assignment does not match the node"); }
    std::vector<std::vector<std::size_t>> parts(branches);
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (assignment[i] >= branches) { throw Error("branch index out of range"); }
      parts[assignment[i]].push_back(node[i]);
    }
    return parts;
  }

  std::vector<ClassDistribution> branch_distributions(const LabeledDataset& data, std::span<const std::size_t> node,
                                                      const Assignment& assignment, std::size_t branches) {
    if (assignment.size() != node.size()) { throw Error("assignment does not match the node"); }
    std::vector<ClassDistribution> dists(branches, ClassDistribution(data.class_count()));
    for (std::size_t i = 0; i < node.size(); ++i) { dists.at(assignment[i]).add(data.label(node[i])); }
    return dists;
  }

  void TreeStats::merge(const TreeStats& other) {
    for (std::size_t t = 0; t < splitter_type_count; ++t) {
      nodes_by_type[t] += other.nodes_by_type[t];
      seconds_by_type[t] += other.seconds_by_type[t];
    }
    leaves += other.leaves;
    forced_leaves += other.forced_leaves;
    audit.insert(audit.end(), other.audit.begin(), other.audit.end());
  }

  Tree build_tree(const TrainingContext& ctx, std::span<const std::size_t> indices, const BuildOptions& options,
                  Rng& rng, TreeStats* stats) {
    if (indices.empty()) { throw Error("cannot grow a tree on an empty training set"); }
    const auto& data = ctx.data;
    for (std::size_t idx : indices) {
      if (idx >= data.size()) { throw Error("training index out of range"); }
    }
    TreeStats local;
    TreeStats& st = stats ? *stats : local;

    Tree tree;
    tree.series_length = data.series_length();
    tree.nodes.emplace_back(Leaf{});

    struct Work {
      std::size_t id;
      std::vector<std::size_t> items;
    };
    std::vector<Work> stack;
    stack.push_back({0, std::vector<std::size_t>(indices.begin(), indices.end())});

    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      const auto& items = work.items;
      const auto dist = distribution_of(data, items);
      if (dist.present_classes() <= 1) {
        tree.nodes[work.id] = Leaf{dist.majority(), false};
        ++st.leaves;
        continue;
      }

      Selection sel;
      std::array<std::size_t, splitter_type_count> candidate_counts{};
      double best_candidate = infinity;
      auto offer = [&](Evaluated e, SplitterType type, std::size_t index, Assignment&& a, std::size_t branches) {
        if (!e.splittable) { return; }
        ++candidate_counts[type_index(type)];
        best_candidate = std::min(best_candidate, e.gini);
        sel.offer(e.gini, type, index, std::move(a), branches, rng);
      };

      std::vector<SimilarityCandidate> sims;
      std::vector<DictionaryCandidate> dicts;
      std::vector<IntervalCandidate> intervals;
      {
        Stopwatch sw;
        sims = generate_similarity_splitters(ctx, items, options.counts.similarity, rng);
        for (std::size_t i = 0; i < sims.size(); ++i) {
          auto a = assign(ctx, items, sims[i], rng);
          const auto branches = sims[i].exemplars.size();
          const auto e = evaluate(data, items, a, branches);
          offer(e, SplitterType::Similarity, i, std::move(a), branches);
        }
        st.seconds_by_type[type_index(SplitterType::Similarity)] += sw.seconds();
      }
      {
        Stopwatch sw;
        dicts = generate_dictionary_splitters(ctx, items, options.counts.dictionary, rng);
        for (std::size_t i = 0; i < dicts.size(); ++i) {
          auto a = assign(ctx, items, dicts[i], rng);
          const auto branches = dicts[i].exemplars.size();
          const auto e = evaluate(data, items, a, branches);
          offer(e, SplitterType::Dictionary, i, std::move(a), branches);
        }
        st.seconds_by_type[type_index(SplitterType::Dictionary)] += sw.seconds();
      }
      {
        Stopwatch sw;
        intervals = generate_interval_splitters(ctx, items, options.counts.interval, rng);
        for (std::size_t i = 0; i < intervals.size(); ++i) {
          if (!intervals[i].splittable) { continue; }
          auto a = assign(intervals[i]);
          const auto e = evaluate(data, items, a, 2);
          offer(e, SplitterType::Interval, i, std::move(a), 2);
        }
        st.seconds_by_type[type_index(SplitterType::Interval)] += sw.seconds();
      }

      if (sel.ties == 0) {
        tree.nodes[work.id] = Leaf{dist.majority(), true};
        ++st.leaves;
        ++st.forced_leaves;
        continue;
      }

      Internal node;
      node.fallback_label = dist.majority();
      switch (sel.type) {
        case SplitterType::Similarity: {
          const auto& c = sims[sel.candidate];
          SimilaritySplitter s{c.measure, {}};
          for (std::size_t e : c.exemplars) { s.exemplars.push_back(data.series(e)); }
          node.splitter = std::move(s);
          break;
        }
        case SplitterType::Dictionary: {
          const auto& c = dicts[sel.candidate];
          const auto& transform = ctx.boss_pool[c.transform_index];
          DictionarySplitter s{c.transform_index, {}};
          for (std::size_t e : c.exemplars) {
            const auto h = transform.histogram(e);
            s.exemplars.push_back(WordHistogram::from_entries({h.begin(), h.end()}));
          }
          node.splitter = std::move(s);
          break;
        }
        case SplitterType::Interval: {
          const auto& c = intervals[sel.candidate];
          node.splitter = IntervalSplitter{c.interval, c.kind, c.attribute, c.threshold};
          break;
        }
      }
      ++st.nodes_by_type[type_index(sel.type)];

      auto parts = partition(items, sel.assignment, sel.branches);
      if (options.audit) {
        std::vector<ClassDistribution> part_dists;
        part_dists.reserve(parts.size());
        for (const auto& p : parts) { part_dists.push_back(distribution_of(data, p)); }
        NodeAudit audit;
        audit.node_size = items.size();
        audit.chosen = sel.type;
        audit.chosen_gini = weighted_gini(items.size(), part_dists);
        audit.best_candidate_gini = best_candidate;
        audit.candidates = candidate_counts;
        st.audit.push_back(audit);
      }

      node.branches.assign(sel.branches, dropped_branch);
      std::vector<Work> children;
      for (std::size_t b = 0; b < parts.size(); ++b) {
        if (parts[b].empty()) { continue; }
        const auto id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back(Leaf{});
        node.branches[b] = id;
        children.push_back({static_cast<std::size_t>(id), std::move(parts[b])});
      }
      tree.nodes[work.id] = std::move(node);
      for (auto it = children.rbegin(); it != children.rend(); ++it) { stack.push_back(std::move(*it)); }
    }
    return tree;
  }

  std::span<const double> QueryCache::derivative() {
    if (!derivative_) { derivative_ = tschief::derivative(query_); }
    return *derivative_;
  }

  HistogramView QueryCache::histogram(std::size_t transform_index, const BossTransform& transform) {
    auto it = histograms_.find(transform_index);
    if (it == histograms_.end()) { it = histograms_.emplace(transform_index, transform.transform(query_)).first; }
    return it->second.view();
  }

  std::size_t route(const Splitter& splitter, QueryCache& memo, std::span<const BossTransform> boss_pool) {
    if (const auto* s = std::get_if<SimilaritySplitter>(&splitter)) {
      if (s->exemplars.empty()) { throw Error("similarity splitter without exemplars"); }
      if (uses_derivative(s->measure.kind)) {
        const auto q = memo.derivative();
        return nearest_first(s->exemplars.size(), [&](std::size_t b, double cutoff) {
          const auto e = derivative(s->exemplars[b].values());
          return distance_prepared(s->measure, q, e, cutoff);
        });
      }
      const auto q = memo.query();
      return nearest_first(s->exemplars.size(), [&](std::size_t b, double cutoff) {
        return distance_prepared(s->measure, q, s->exemplars[b].values(), cutoff);
      });
    }
    if (const auto* d = std::get_if<DictionarySplitter>(&splitter)) {
      if (d->transform_index >= boss_pool.size()) { throw Error("dictionary splitter refers to a missing transform"); }
      if (d->exemplars.empty()) { throw Error("dictionary splitter without exemplars"); }
      const auto h = memo.histogram(d->transform_index, boss_pool[d->transform_index]);
      return nearest_first(d->exemplars.size(), [&](std::size_t b, double cutoff) {
        return boss_dist(h, d->exemplars[b].view(), cutoff);
      });
    }
    const auto& iv = std::get<IntervalSplitter>(splitter);
    const auto values = transform_interval(memo.query(), iv.interval, iv.kind);
    if (iv.attribute >= values.size()) { throw Error("interval splitter attribute out of range"); }
    return values[iv.attribute] <= iv.threshold ? 0 : 1;
  }

  Label classify(const Tree& tree, QueryCache& memo, std::span<const BossTransform> boss_pool) {
    if (tree.nodes.empty()) { throw Error("empty tree"); }
    if (memo.query().size() != tree.series_length) {
      throw Error("length mismatch: query has " + std::to_string(memo.query().size()) + " values, model expects "
                  + std::to_string(tree.series_length));
    }
    std::size_t id = 0;
    for (std::size_t steps = 0; steps <= tree.nodes.size(); ++steps) {
      const auto& n = tree.nodes[id];
      if (const auto* leaf = std::get_if<Leaf>(&n)) { return leaf->label; }
      const auto& in = std::get<Internal>(n);
      const std::size_t b = route(in.splitter, memo, boss_pool);
      if (b >= in.branches.size() || in.branches[b] == dropped_branch) { return in.fallback_label; }
      id = static_cast<std::size_t>(in.branches[b]);
      if (id >= tree.nodes.size()) { throw Error("tree node id out of range"); }
    }
    throw Error("tree contains a cycle");
  }

} // namespace tschief
