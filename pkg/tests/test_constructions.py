import pytest
from math import comb

from qturan.constructions import (LiftConfig, ModularConfig, SplitConfig,
                                  centered_family, construct_lift,
                                  construct_modular, construct_split,
                                  modular_membership, prime_select)
from qturan.errors import BaseNotFreeError, ParameterError
from qturan.hypergraphs import Hypergraph
from qturan.numbers import GoodSet
from qturan.patterns import QPattern, find_Q_copy, generate_Q


class TestModularConfig:
    def test_defaults(self):
        cfg = ModularConfig(k=4, p=7, S=(0, 1))
        assert cfg.m == (1, 2, 3, 4)
        assert cfg.alpha == 0 and cfg.beta == 0
        assert isinstance(cfg.S, GoodSet) and cfg.S.provenance == "user"

    def test_levels_normalized(self):
        cfg = ModularConfig(k=3, p=5, S=(0, 1), alpha=7, beta=-1)
        assert cfg.alpha == 2 and cfg.beta == 4

    def test_guards(self):
        with pytest.raises(ParameterError):
            ModularConfig(k=2, p=5, S=(0, 1))
        with pytest.raises(ParameterError):
            ModularConfig(k=3, p=9, S=(0, 1))
        with pytest.raises(ParameterError):
            ModularConfig(k=5, p=5, S=(0, 1))
        with pytest.raises(ParameterError):
            ModularConfig(k=3, p=5, S=(0, 1), m=(1, 2))
        with pytest.raises(ParameterError):
            ModularConfig(k=3, p=5, S=(0, 1), m=(1, 2, 6))  # 6 = 1 mod 5

    def test_goodset_must_match(self):
        g = GoodSet(p=7, k=3, S=(0, 1), provenance="user")
        with pytest.raises(ParameterError):
            ModularConfig(k=3, p=11, S=g)

    def test_bad_set_rejected(self):
        with pytest.raises(ParameterError):
            ModularConfig(k=3, p=11, S=(0, 1, 2))


class TestConstructModular:
    def test_edge_count_small(self):
        h = construct_modular(ModularConfig(k=3, p=5, S=(0, 1)))
        assert h.n == 15 and h.m == 2 * 5

    def test_edge_count_k4(self):
        h = construct_modular(ModularConfig(k=4, p=5, S=(0, 1)))
        assert h.n == 20 and h.m == 2 * 25

    def test_meta_records_parameters(self):
        cfg = ModularConfig(k=3, p=5, S=(0, 1), alpha=1, beta=2)
        h = construct_modular(cfg)
        assert h.meta["construction"] == "modular"
        assert h.meta["alpha"] == 1 and h.meta["beta"] == 2
        assert h.meta["S"] == [0, 1] and h.meta["m"] == [1, 2, 3]
        assert h.meta["freeness_target"] == "Q:3:3"
        assert h.meta["layout"]["part_size"] == 5

    def test_edges_are_transversal(self):
        cfg = ModularConfig(k=4, p=7, S=(0, 1))
        h = construct_modular(cfg)
        for e in h.edges:
            assert [v // 7 for v in e] == [0, 1, 2, 3]

    def test_membership_closure(self):
        cfg = ModularConfig(k=3, p=7, S=(0, 1), alpha=2, beta=5)
        h = construct_modular(cfg)
        found = set()
        for e in h.edges:
            xs = [v - i * 7 for i, v in enumerate(e)]
            s = modular_membership(cfg, xs)
            assert s is not None and s in cfg.S.S
            found.add(tuple(xs))
        # single-coordinate perturbations always leave the family
        for e in h.edges:
            xs = [v - i * 7 for i, v in enumerate(e)]
            for i in range(3):
                for delta in (1, 3):
                    ys = list(xs)
                    ys[i] = (ys[i] + delta) % 7
                    assert tuple(ys) not in found

    def test_membership_arity(self):
        cfg = ModularConfig(k=3, p=5, S=(0, 1))
        with pytest.raises(ParameterError):
            modular_membership(cfg, (0, 1))

    @pytest.mark.parametrize("k,p", [(3, 5), (3, 7), (4, 5)])
    def test_q3_freeness(self, k, p):
        h = construct_modular(ModularConfig(k=k, p=p, S=(0, 1)))
        assert find_Q_copy(h, QPattern(k=k, r=3)) is None

    def test_levels_preserve_count_and_freeness(self):
        for alpha, beta in [(1, 0), (0, 3), (2, 4)]:
            h = construct_modular(
                ModularConfig(k=3, p=5, S=(0, 1), alpha=alpha, beta=beta))
            assert h.m == 10
            assert find_Q_copy(h, QPattern(k=3, r=3)) is None

    def test_custom_weights(self):
        h = construct_modular(ModularConfig(k=3, p=7, S=(0, 1), m=(2, 5, 6)))
        assert h.m == 2 * 7
        assert find_Q_copy(h, QPattern(k=3, r=3)) is None


class TestSplit:
    def test_config_guards(self):
        with pytest.raises(ParameterError):
            SplitConfig(n=20, k=4, r=2)
        with pytest.raises(ParameterError):
            SplitConfig(n=20, k=7, r=4)  # k > 2r-2
        with pytest.raises(ParameterError):
            SplitConfig(n=7, k=4, r=3)  # n < 2k

    def test_count_formula(self):
        cfg = SplitConfig(n=12, k=4, r=3)
        h = construct_split(cfg)
        # block on X: disjoint pairs from 6 vertices; Y side: all 2-sets
        assert h.m == 3 * comb(6, 2)
        assert h.meta["packing_size"] == 3 and h.meta["X_size"] == 6

    def test_freeness(self):
        h = construct_split(SplitConfig(n=12, k=4, r=3))
        assert h.meta["freeness_target"] == "Q:4:3"
        assert find_Q_copy(h, QPattern(k=4, r=3)) is None

    def test_odd_n(self):
        h = construct_split(SplitConfig(n=13, k=4, r=3))
        assert h.m == 3 * comb(7, 2)


class TestLift:
    @staticmethod
    def matching_base():
        return Hypergraph(n=6, k=3, edges=((0, 1, 2), (3, 4, 5)))

    def test_config_pins_uniformity(self):
        cfg = LiftConfig(r=3, base=self.matching_base(), n2=3)
        assert cfg.k == 5
        with pytest.raises(ParameterError):
            LiftConfig(r=3, base=self.matching_base(), n2=3, k=6)

    def test_config_guards(self):
        with pytest.raises(ParameterError):
            LiftConfig(r=2, base=Hypergraph(n=2, k=2, edges=((0, 1),)), n2=3)
        with pytest.raises(ParameterError):
            LiftConfig(r=3, base=Hypergraph(n=4, k=4, edges=((0, 1, 2, 3),)), n2=3)
        with pytest.raises(ParameterError):
            LiftConfig(r=3, base=self.matching_base(), n2=1)

    def test_happy_path(self):
        h = construct_lift(LiftConfig(r=3, base=self.matching_base(), n2=3))
        assert h.n == 9 and h.m == 2 * comb(3, 2)
        assert h.meta["freeness_target"] == "Q:5:3"
        assert find_Q_copy(h, QPattern(k=5, r=3)) is None
        # lifted vertices sit above the base layer
        for e in h.edges:
            assert sum(1 for v in e if v >= 6) == 2

    def test_rejects_base_with_full_overlap(self):
        base = generate_Q(3, 3)
        with pytest.raises(BaseNotFreeError) as info:
            construct_lift(LiftConfig(r=3, base=base, n2=3))
        cert = info.value.certificate
        cert.validate(base)

    def test_rejects_base_with_tight_pair(self):
        base = Hypergraph(n=4, k=3, edges=((0, 1, 2), (0, 1, 3)))
        with pytest.raises(BaseNotFreeError) as info:
            construct_lift(LiftConfig(r=3, base=base, n2=3))
        assert info.value.certificate == (0, 1)


class TestStarAndPrimes:
    def test_star_count(self):
        h = centered_family(7, 3)
        assert h.m == comb(6, 2)
        assert all(e[0] == 0 for e in h.edges)

    @pytest.mark.parametrize("n,k", [(6, 3), (8, 3), (7, 4)])
    def test_star_freeness(self, n, k):
        h = centered_family(n, k)
        assert h.meta["freeness_target"] == f"Q:{k}:{k}"
        assert find_Q_copy(h, QPattern(k=k, r=k)) is None

    def test_star_guards(self):
        with pytest.raises(ParameterError):
            centered_family(3, 3)
        with pytest.raises(ParameterError):
            centered_family(5, 1)

    def test_prime_select(self):
        assert prime_select(50, 5) == 7
        assert prime_select(20, 4) == 5
        assert prime_select(100, 3) == 31

    def test_prime_select_empty_window(self):
        with pytest.raises(ParameterError):
            prime_select(30, 5)  # window (5, 6] holds no prime
        with pytest.raises(ParameterError):
            prime_select(12, 3)
