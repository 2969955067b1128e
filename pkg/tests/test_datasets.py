import io
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intuition_bench.datasets import (
    CAR_ATTRIBUTES,
    CAR_DOMAINS,
    CarRecord,
    DataError,
    EntityTag,
    PokerRecord,
    best_fit_value,
    car_reference,
    detect_dataset,
    dump_records,
    inject_alien_records,
    inject_deck_change,
    load_car,
    load_poker,
    parse_car_line,
    parse_poker_line,
    read_car,
    read_reveal_log,
    reveal_iterator,
    write_reveal_log,
)
from intuition_bench.poker import FULL_DECK, hand_class
from intuition_bench.synth import car_rows, poker_rows


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestCarParsing:
    def test_example_line(self):
        rec = parse_car_line("vhigh,vhigh,2,2,small,low,unacc")
        assert rec.values == ("vhigh", "vhigh", "2", "2", "small", "low")
        assert rec.label == "unacc" and rec.class_index == 0

    def test_empty_file(self, tmp_path):
        assert load_car(write(tmp_path, "car.data", "")) == []

    def test_five_fields_names_line(self, tmp_path):
        p = write(tmp_path, "car.data", "vhigh,vhigh,2,2,small,low,unacc\nvhigh,vhigh,2,2,small\n")
        with pytest.raises(DataError) as err:
            load_car(p)
        assert err.value.line_no == 2
        assert "line 2" in str(err.value)

    def test_lenient_skips(self, tmp_path):
        p = write(tmp_path, "car.data", "vhigh,vhigh,2,2,small\nlow,low,4,4,big,high,vgood\n")
        records, errors = read_car(p, strict=False)
        assert len(records) == 1 and [e.line_no for e in errors] == [1]

    def test_out_of_domain_rejected(self):
        with pytest.raises(DataError):
            parse_car_line("vhigh,vhigh,12,2,small,low,unacc")

    def test_round_trip(self, tmp_path):
        rows = car_rows()
        text = dump_records(rows)
        p = write(tmp_path, "car.data", text)
        back = load_car(p)
        assert dump_records(back) == text
        assert [r.values for r in back] == [r.values for r in rows]


class TestPokerParsing:
    def test_royal_flush(self):
        rec = parse_poker_line("1,10,1,11,1,13,1,12,1,1,9")
        assert rec.label == 9 and hand_class(rec.cards) == 9

    def test_duplicate_card(self):
        with pytest.raises(DataError):
            parse_poker_line("1,10,1,10,1,13,1,12,1,1,9")

    def test_bad_ranges(self):
        with pytest.raises(DataError):
            parse_poker_line("5,10,1,11,1,13,1,12,1,1,9")
        with pytest.raises(DataError):
            parse_poker_line("1,10,1,11,1,13,1,12,1,1,12")

    def test_empty(self, tmp_path):
        assert load_poker(write(tmp_path, "p.data", "\n")) == []

    def test_round_trip_and_label_oracle(self, tmp_path):
        rows = poker_rows(500, 3)
        p = write(tmp_path, "p.data", dump_records(rows))
        back = load_poker(p)
        assert dump_records(back) == p.read_text()
        assert all(hand_class(r.cards) == r.label for r in back)

    def test_detect(self, tmp_path):
        assert detect_dataset(write(tmp_path, "a", "1,10,1,11,1,13,1,12,1,1,9\n")) == "poker"
        assert detect_dataset(write(tmp_path, "b", "low,low,4,4,big,high,vgood\n")) == "car"
        with pytest.raises(DataError):
            detect_dataset(write(tmp_path, "c", "a,b,c\n"))


class TestSyntheticCar:
    def test_full_product(self):
        rows = car_rows()
        assert len(rows) == 1728
        assert len({r.values for r in rows}) == 1728
        counts = Counter(r.label for r in rows)
        assert set(counts) == {"unacc", "acc", "good", "vgood"}
        assert counts.most_common(1)[0][0] == "unacc"


class TestInjection:
    rows = car_rows()[:300]

    def test_fraction_zero(self):
        out = inject_alien_records(self.rows, 0.0, seed=1, equal_split=True)
        assert all(a is b for a, b in zip(out, self.rows))

    def test_fraction_one(self):
        out = inject_alien_records(self.rows, 1.0, seed=1)
        assert all(r.entity is EntityTag.UNKNOWN and r.is_alien for r in out)

    @pytest.mark.parametrize("n", [299, 300, 301, 1000])
    def test_equal_split(self, n):
        rows = (car_rows() * 2)[:n]
        out = inject_alien_records(rows, 1 / 3, seed=5, equal_split=True)
        counts = Counter(r.entity for r in out)
        assert max(counts.values()) - min(counts.values()) <= 1
        assert sum(counts.values()) == n

    def test_untouched_rows_identical(self):
        out = inject_alien_records(self.rows, 0.4, seed=2, equal_split=True)
        for before, after in zip(self.rows, out):
            if after.entity is EntityTag.KNOWN:
                assert after is before

    def test_alien_tokens_out_of_domain(self):
        out = inject_alien_records(self.rows, 0.5, seed=3, reference=car_reference(car_rows()))
        aliens = [r for r in out if r.entity is EntityTag.UNKNOWN]
        assert aliens
        for r in aliens:
            odd = [(a, v) for a, v in zip(CAR_ATTRIBUTES, r.values) if v not in CAR_DOMAINS[a]]
            assert odd and {a for a, _ in odd} <= {"doors", "persons"}

    def test_alien_label_from_best_fit(self):
        ref = car_reference(car_rows())
        out = inject_alien_records(car_rows(), 0.2, seed=4, reference=ref)
        for r in out:
            if r.entity is EntityTag.UNKNOWN:
                fitted = tuple(best_fit_value(a, v) for a, v in zip(CAR_ATTRIBUTES, r.values))
                assert r.label == ref[fitted]

    def test_best_fit(self):
        assert best_fit_value("persons", "40") == "more"
        assert best_fit_value("doors", "3") == "3"
        assert best_fit_value("doors", "12") == "5more"
        assert best_fit_value("safety", "armoured") is None

    def test_hidden_never_first_step(self):
        out = inject_alien_records(poker_rows(600, 1), 1 / 3, seed=6, equal_split=True)
        hidden = [r for r in out if r.entity is EntityTag.HIDDEN]
        assert hidden and all(1 <= r.hidden_step <= 4 for r in hidden)
        for r in hidden:
            seq = reveal_iterator(r)
            assert [s.tag for s in seq.steps].count(EntityTag.HIDDEN) == 1
            assert len(seq.visible(4)) == 4

    def test_poker_unknown_gets_deck_change(self):
        out = inject_alien_records(poker_rows(300, 2), 1 / 3, seed=7, equal_split=True)
        unknown = [r for r in out if r.entity is EntityTag.UNKNOWN]
        assert unknown
        for r in unknown:
            seq = reveal_iterator(r)
            assert seq.events == (("deck_change", r.deck_change_step),)
            hand = [s.value for s in seq.steps]
            assert seq.label == hand_class(hand)

    def test_deterministic(self):
        a = inject_alien_records(self.rows, 1 / 3, seed=9, equal_split=True)
        b = inject_alien_records(self.rows, 1 / 3, seed=9, equal_split=True)
        assert a == b


HAND = PokerRecord(((1, 2), (2, 7), (3, 7), (4, 11), (1, 13)), 1)


class TestDeckChange:
    def test_at_end_changes_nothing(self):
        seq = reveal_iterator(HAND)
        after = inject_deck_change(seq, 5, seed=1)
        assert after.steps == seq.steps and after.label == seq.label

    def test_at_zero_redraws_whole_hand(self):
        seq = reveal_iterator(HAND)
        after = inject_deck_change(seq, 0, seed=11)
        assert all(s.tag is EntityTag.UNKNOWN for s in after.steps)
        assert after.label == hand_class([s.value for s in after.steps])

    def test_same_seed_same_redraw(self):
        seq = reveal_iterator(HAND)
        assert inject_deck_change(seq, 2, 5) == inject_deck_change(seq, 2, 5)
        assert inject_deck_change(seq, 2, 5).steps[:2] == seq.steps[:2]

    def test_past_end(self):
        with pytest.raises(IndexError):
            inject_deck_change(reveal_iterator(HAND), 6, 0)

    def test_car_rejected(self):
        with pytest.raises(ValueError):
            inject_deck_change(reveal_iterator(car_rows()[0]), 1, 0)

    @settings(max_examples=50)
    @given(st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_label_oracle(self, step, seed):
        after = inject_deck_change(reveal_iterator(HAND), step, seed)
        cards = [s.value for s in after.steps]
        assert all(c in FULL_DECK for c in cards)
        assert after.label == hand_class(cards)
        assert [s.tag is EntityTag.UNKNOWN for s in after.steps] == [k >= step for k in range(5)]


class TestReveal:
    def test_covers_each_slot_once(self):
        rec = car_rows()[100]
        seq = reveal_iterator(rec, order=[5, 3, 1, 0, 2, 4])
        assert sorted(s.slot for s in seq.steps) == list(range(6))
        assert [s.index for s in seq.steps] == list(range(6))
        assert seq.steps[0].value == rec.values[5]

    def test_bad_order(self):
        with pytest.raises(ValueError):
            reveal_iterator(car_rows()[0], order=[0, 0, 1, 2, 3, 4])

    def test_alien_slots_tagged_unknown(self):
        rec = CarRecord(("low", "low", "12", "40", "big", "high"), "acc", EntityTag.UNKNOWN)
        tags = [s.tag for s in reveal_iterator(rec).steps]
        assert tags == [EntityTag.KNOWN, EntityTag.KNOWN, EntityTag.UNKNOWN, EntityTag.UNKNOWN, EntityTag.KNOWN, EntityTag.KNOWN]

    def test_reveal_log_round_trip(self):
        recs = inject_alien_records(poker_rows(40, 8), 1 / 3, 8, equal_split=True)
        recs += inject_alien_records(car_rows()[:40], 1 / 3, 8, equal_split=True)
        seqs = [reveal_iterator(r) for r in recs]
        buf = io.StringIO()
        assert write_reveal_log(seqs, buf) == sum(len(s.steps) for s in seqs)
        buf.seek(0)
        assert read_reveal_log(buf) == seqs
