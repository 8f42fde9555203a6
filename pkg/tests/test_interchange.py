import numpy as np
import pytest

from gblab.chains import cube
from gblab.chains import simplex
from gblab.errors import InputError
from gblab.group import GroupElement
from gblab.interchange import chain_record
from gblab.interchange import dump_json
from gblab.interchange import load_json
from gblab.interchange import parse_chain
from gblab.interchange import parse_matrix
from gblab.interchange import parse_tensor
from gblab.interchange import read_chain
from gblab.interchange import read_matrix
from gblab.interchange import read_tensor


class TestFiles:
    """
    Tests for reading JSON files.
    """

    def test_malformed(self, tmp_path):
        """
        Test that a syntax error names the file, line and column.
        """
        path = tmp_path / "broken.json"
        path.write_text('{\n  "matrix": [1, 2,\n', encoding="utf-8")

        with pytest.raises(InputError) as err:
            load_json(path)

        assert str(err.value).startswith(f"{path}:")

    def test_missing(self, tmp_path):
        """
        Test that an unreadable file is an InputError.
        """
        with pytest.raises(InputError):
            load_json(tmp_path / "missing.json")

    def test_read_matrix(self, write_json):
        """
        Test reading a bare or wrapped matrix.
        """
        bare = read_matrix(write_json("bare.json", [[0, 1], [-1, 0]]))
        wrapped = read_matrix(write_json("wrapped.json", {"matrix": [[0, 1], [-1, 0]]}))

        np.testing.assert_array_equal(bare, wrapped)
        assert bare.dtype == float

    def test_read_tensor(self, write_json):
        """
        Test reading a wrapped tensor.
        """
        tensor = read_tensor(write_json("tensor.json", {"tensor": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}))

        assert tensor.shape == (2, 2, 2)
        assert tensor[1, 1, 1] == 1.0


class TestParseArrays:
    """
    Tests for matrix and tensor validation.
    """

    @pytest.mark.parametrize(
        ("payload", "message"),
        [
            pytest.param([], "nonempty", id="empty"),
            pytest.param([[1, 2], [3]], r"row \[1\]", id="ragged"),
            pytest.param([[1, "x"]], r"\[0\]\[1\]", id="string"),
            pytest.param([[True, 0]], r"\[0\]\[0\]", id="bool"),
            pytest.param([1, 2], r"row \[0\]", id="flat"),
            pytest.param({"rows": [[1]]}, "'matrix'", id="missing-key"),
        ],
    )
    def test_bad_matrix(self, payload, message):
        """
        Test that the message points at the offending entry.
        """
        with pytest.raises(InputError, match=message):
            parse_matrix(payload, "m.json")

    def test_bad_tensor_slice(self):
        """
        Test that every slice must be n x n.
        """
        with pytest.raises(InputError, match=r"slice \[1\]"):
            parse_tensor([[[1, 0], [0, 1]], [[1, 0, 0], [0, 1, 0]]])


class TestChains:
    """
    Tests for chain records.
    """

    def test_parse(self):
        """
        Test that 1-based indices build the same chain as the constructors.
        """
        payload = {"kind": "simplex", "n": 3, "cells": [{"g": [1, -1, 1], "I": [2, 1], "coeff": 2}]}

        chain = parse_chain(payload)

        assert chain == simplex(3, GroupElement([1, -1, 1]), [1, 0], 2)
        assert chain == simplex(3, GroupElement([1, -1, 1]), [0, 1], -2)

    def test_record_reads_back(self, write_json):
        """
        Test that a record of a twisted cube chain reads back to the same chain.
        """
        chain = cube(3, GroupElement([-1, 1, -1]), [1], 3) + cube(3, GroupElement([1, 1, 1]), [0, 2])

        assert read_chain(write_json("chain.json", chain_record(chain))) == chain

    @pytest.mark.parametrize(
        "payload",
        [
            pytest.param([], id="not-object"),
            pytest.param({"kind": "prism", "n": 2, "cells": []}, id="kind"),
            pytest.param({"kind": "cube", "n": 0, "cells": []}, id="rank"),
            pytest.param({"kind": "cube", "n": 2.0, "cells": []}, id="float-rank"),
            pytest.param({"kind": "cube", "n": 2, "cells": {}}, id="cells"),
            pytest.param({"kind": "cube", "n": 2, "cells": [{"g": [1], "I": [1]}]}, id="short-g"),
            pytest.param({"kind": "cube", "n": 2, "cells": [{"g": [1, 2], "I": [1]}]}, id="bad-sign"),
            pytest.param({"kind": "cube", "n": 2, "cells": [{"g": [1, 1], "I": [0]}]}, id="zero-index"),
            pytest.param({"kind": "cube", "n": 2, "cells": [{"g": [1, 1], "I": []}]}, id="no-index"),
            pytest.param({"kind": "cube", "n": 2, "cells": [{"g": [1, 1], "I": [1], "coeff": 0.5}]}, id="coeff"),
        ],
    )
    def test_bad_chain(self, payload):
        """
        Test chain record validation.
        """
        with pytest.raises(InputError):
            parse_chain(payload)

    def test_dump_json(self):
        """
        Test that numpy values are converted and keys sorted.
        """
        text = dump_json({"b": np.float64(0.5), "a": (np.arange(2), np.int64(3))})

        assert text == '{\n  "a": [\n    [\n      0,\n      1\n    ],\n    3\n  ],\n  "b": 0.5\n}\n'
