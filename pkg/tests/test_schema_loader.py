# =============================================================================
# tests/test_schema_loader.py — Tests for schema parsing and resolution
# =============================================================================

import json
from datetime import date

import pytest

from constraints.loader import load_schema, parse_schema
from constraints.model import DeclaredType, RangeSpec
from core.errors import SchemaError
from core.settings import SettingsManager

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def shop_schema(**overrides) -> dict:
    """A two-table schema with a list reference and a summing expression."""
    document = {
        "tables": {
            "item": {
                "columns": {
                    "ItemID": {"type": "integer", "required": True},
                    "Price": {"type": "float", "range": {"min": 0}},
                },
                "key": ["ItemID"],
            },
            "order": {
                "columns": {
                    "OrderID": {"type": "integer"},
                    "Items": {"type": "id_list"},
                    "Total": {"type": "float"},
                },
                "key": ["OrderID"],
            },
        },
        "cross_table": [
            {"id": "item_ref", "kind": "reference", "from": "order.Items[*]", "to": "item.ItemID"},
            {"id": "total", "kind": "expression", "expr": "order.Total == sum(item.Price)"},
        ],
    }
    document.update(overrides)
    return document


def parse(document: dict, **kwargs):
    return parse_schema(json.dumps(document), **kwargs)


# ---------------------------------------------------------------------------
# Golden schema
# ---------------------------------------------------------------------------


class TestGoldenSchema:
    """Tests against the shipped convenience-store schema."""

    def test_tables_and_columns(self, golden_schema):
        assert list(golden_schema.tables) == ["product", "purchase"]
        assert len(golden_schema.table("product").columns) == 5
        assert len(golden_schema.table("purchase").columns) == 4

    def test_rules(self, golden_schema):
        product = golden_schema.table("product")
        assert [rule.id for rule in product.row_rules] == ["final_price", "discount_cap"]
        assert [rule.id for rule in golden_schema.cross_table] == ["product_ref", "purchase_total"]

    def test_keys_and_flags(self, golden_schema):
        product = golden_schema.table("product")
        assert product.key == ("ProductID",)
        assert product.column("ProductName").label_like
        assert product.column("ProductID").required
        assert not product.column("Discount").required

    def test_pattern_compiles(self, golden_schema):
        product_id = golden_schema.table("product").column("ProductID")
        assert product_id.matches_pattern("10001")
        assert not product_id.matches_pattern("1001")
        assert not product_id.matches_pattern("100011")

    def test_expected_keys_resolve_next_to_schema(self, golden_schema, golden_dir):
        expected = golden_schema.table("purchase").expected_keys
        assert expected == golden_dir / "expected_purchase_ids.txt"

    def test_expression_joins_through_reference(self, golden_schema):
        rule = golden_schema.rule("purchase_total")
        assert rule.via == "product_ref"
        assert rule.tables == ("purchase", "product")

    def test_default_null_policy(self, golden_schema):
        assert golden_schema.null_policy.is_null("NaN")
        assert not golden_schema.null_policy.is_null("nan")


# ---------------------------------------------------------------------------
# Accepted shapes
# ---------------------------------------------------------------------------


class TestAcceptedSchemas:
    """Tests for schemas that must load."""

    def test_zero_tables(self):
        schema = parse({"tables": {}})
        assert dict(schema.tables) == {}
        assert schema.cross_table == ()

    def test_via_is_inferred(self):
        schema = parse(shop_schema())
        assert schema.rule("total").via == "item_ref"

    def test_range_bounds(self):
        schema = parse(
            {
                "tables": {
                    "t": {
                        "columns": {
                            "n": {"type": "integer", "range": {"min": 1, "max_inclusive": False}},
                            "d": {"type": "date", "range": {"max": "2024-12-31"}},
                        }
                    }
                }
            }
        )
        n = schema.table("t").column("n")
        assert n.range == RangeSpec(min=1, max=None, max_inclusive=False)
        assert schema.table("t").column("d").range.max == date(2024, 12, 31)

    def test_float_enum_is_normalised(self):
        schema = parse({"tables": {"t": {"columns": {"f": {"type": "float", "enum": [1, 2.5]}}}}})
        assert schema.table("t").column("f").enum == (1.0, 2.5)

    def test_default_type_is_text(self):
        schema = parse({"tables": {"t": {"columns": {"s": {}}}}})
        assert schema.table("t").column("s").declared_type is DeclaredType.TEXT

    def test_custom_null_tokens(self):
        schema = parse({"tables": {}, "null_tokens": ["-", "?"]})
        assert schema.null_policy.tokens == ("-", "?")
        assert not schema.null_policy.is_null("")

    def test_tolerance_from_environment(self):
        document = {"tables": {"t": {"columns": {"a": {"type": "float"}}, "rules": [
            {"id": "pos", "expr": "a >= 0"},
            {"id": "own", "expr": "a == a", "tolerance": 0.5},
        ]}}}
        settings = SettingsManager({"DATATRIAGE_TOLERANCE": "0.1"})
        rules = parse(document, settings=settings).table("t").row_rules
        assert [rule.tolerance for rule in rules] == [0.1, 0.5]

    def test_smell_params_are_kept(self):
        schema = parse({"tables": {}, "smell_params": {"iqr_k": 3}})
        assert dict(schema.smell_params) == {"iqr_k": 3}

    def test_load_schema_reads_file(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps(shop_schema()), encoding="utf-8")
        assert list(load_schema(path).tables) == ["item", "order"]

    def test_load_schema_ignores_byte_order_mark(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps(shop_schema()), encoding="utf-8-sig")
        assert list(load_schema(path).tables) == ["item", "order"]


# ---------------------------------------------------------------------------
# Rejected shapes
# ---------------------------------------------------------------------------


class TestRejectedSchemas:
    """Tests for schema errors."""

    def test_json_syntax_error_has_line(self):
        with pytest.raises(SchemaError) as excinfo:
            parse_schema('{\n  "tables": {,}\n}')
        assert excinfo.value.line == 2
        assert excinfo.value.column is not None

    def test_unknown_column_in_rule(self):
        document = {"tables": {"t": {"columns": {"Price": {"type": "float"}}, "rules": [
            {"id": "final_price", "expr": "Pricee > 0"},
        ]}}}
        with pytest.raises(SchemaError, match="Unknown column 'Pricee'") as excinfo:
            parse(document)
        assert "final_price" in str(excinfo.value)

    def test_duplicate_rule_id(self):
        document = {"tables": {"t": {"columns": {"a": {"type": "float"}}, "rules": [
            {"id": "r", "expr": "a > 0"},
            {"id": "r", "expr": "a < 10"},
        ]}}}
        with pytest.raises(SchemaError, match="Duplicate rule id 'r'"):
            parse(document)

    def test_duplicate_cross_table_id(self):
        document = shop_schema()
        document["cross_table"][1]["id"] = "item_ref"
        with pytest.raises(SchemaError, match="Duplicate rule id"):
            parse(document)

    def test_invalid_regular_expression(self):
        with pytest.raises(SchemaError, match="Invalid regular expression"):
            parse({"tables": {"t": {"columns": {"a": {"pattern": "[0-9"}}}}})

    def test_aggregate_in_row_rule(self):
        document = {"tables": {"t": {"columns": {"a": {"type": "float"}}, "rules": [
            {"id": "r", "expr": "sum(t.a) > 0"},
        ]}}}
        with pytest.raises(SchemaError, match="only allowed in cross-table"):
            parse(document)

    def test_rule_syntax_error_is_a_schema_error(self):
        document = {"tables": {"t": {"columns": {"a": {"type": "float"}}, "rules": [
            {"id": "r", "expr": "a >"},
        ]}}}
        with pytest.raises(SchemaError, match="rule 'r'"):
            parse(document)

    def test_non_boolean_rule(self):
        document = {"tables": {"t": {"columns": {"a": {"type": "float"}}, "rules": [
            {"id": "r", "expr": "a + 1"},
        ]}}}
        with pytest.raises(SchemaError, match="not boolean"):
            parse(document)

    def test_unknown_field(self):
        with pytest.raises(SchemaError, match="Unknown field"):
            parse({"tables": {"t": {"columns": {"a": {"typ": "float"}}}}})

    def test_unknown_type(self):
        with pytest.raises(SchemaError, match="Unknown type"):
            parse({"tables": {"t": {"columns": {"a": {"type": "decimal"}}}}})

    def test_unknown_key_column(self):
        with pytest.raises(SchemaError, match="Key column 'b' not found"):
            parse({"tables": {"t": {"columns": {"a": {}}, "key": ["b"]}}})

    def test_range_and_enum_together(self):
        spec = {"type": "integer", "range": {"min": 0}, "enum": [1]}
        with pytest.raises(SchemaError, match="both range and enum"):
            parse({"tables": {"t": {"columns": {"a": spec}}}})

    def test_min_above_max(self):
        spec = {"type": "integer", "range": {"min": 5, "max": 1}}
        with pytest.raises(SchemaError, match="min > max"):
            parse({"tables": {"t": {"columns": {"a": spec}}}})

    def test_range_on_text(self):
        with pytest.raises(SchemaError, match="numeric or date"):
            parse({"tables": {"t": {"columns": {"a": {"type": "text", "range": {"min": 0}}}}}})

    def test_id_list_without_reference(self):
        with pytest.raises(SchemaError, match="no reference rule"):
            parse({"tables": {"t": {"columns": {"ids": {"type": "id_list"}}}}})

    def test_reference_to_non_key(self):
        document = shop_schema()
        document["cross_table"][0]["to"] = "item.Price"
        with pytest.raises(SchemaError, match="not a key column"):
            parse(document)

    def test_reference_to_unknown_table(self):
        document = shop_schema()
        document["cross_table"][0]["to"] = "stock.ItemID"
        with pytest.raises(SchemaError, match="unknown table 'stock'"):
            parse(document)

    def test_unqualified_column_in_expression(self):
        document = shop_schema()
        document["cross_table"][1]["expr"] = "Total == sum(item.Price)"
        with pytest.raises(SchemaError, match="table-qualified"):
            parse(document)

    def test_list_join_needs_aggregate(self):
        document = shop_schema()
        document["cross_table"][1]["expr"] = "order.Total == item.Price"
        with pytest.raises(SchemaError, match="aggregate it with sum"):
            parse(document)

    def test_unknown_via(self):
        document = shop_schema()
        document["cross_table"][1]["via"] = "nope"
        with pytest.raises(SchemaError, match="unknown reference"):
            parse(document)

    def test_expected_keys_need_a_key(self):
        document = {"tables": {"t": {"columns": {"a": {}}, "expected_keys": "keys.txt"}}}
        with pytest.raises(SchemaError, match="no key"):
            parse(document)

    def test_bad_smell_params(self):
        with pytest.raises(SchemaError, match="smell_params"):
            parse({"tables": {}, "smell_params": {"iqr": 2}})

    def test_empty_null_tokens(self):
        with pytest.raises(SchemaError, match="null_tokens"):
            parse({"tables": {}, "null_tokens": []})

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="Cannot read schema"):
            load_schema(tmp_path / "absent.json")
