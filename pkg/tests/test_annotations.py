"""Summary-file parsing: block grammar, counts, validation."""

from __future__ import annotations

import pytest

from seizurefg.annotations import parse_annotations
from seizurefg.errors import AnnotationError

ONE_SEIZURE = """\
Data Sampling Rate: 256 Hz

File Name: chb01_03.edf
File Start Time: 13:43:04
File End Time: 14:43:04
Number of Seizures in File: 1
Seizure Start Time: 2996 seconds
Seizure End Time: 3036 seconds
"""

NO_SEIZURE = """\
File Name: chb01_01.edf
Number of Seizures in File: 0
"""

NUMBERED_STYLE = """\
File Name: chb24_11.edf
Number of Seizures in File: 2
Seizure 1 Start Time: 10 seconds
Seizure 1 End Time: 30 seconds
Seizure 2 Start Time: 100 seconds
Seizure 2 End Time: 164 seconds
"""


def write(tmp_path, text):
    path = tmp_path / "summary.txt"
    path.write_text(text)
    return path


class TestParseAnnotations:
    def test_single_seizure_block(self, tmp_path):
        anns = parse_annotations(write(tmp_path, ONE_SEIZURE))
        assert len(anns) == 1
        assert anns[0].start_s == 2996
        assert anns[0].end_s == 3036
        assert anns[0].file_id == "chb01_03"

    def test_zero_seizures_yield_nothing(self, tmp_path):
        assert parse_annotations(write(tmp_path, NO_SEIZURE)) == []

    def test_numbered_seizure_lines(self, tmp_path):
        anns = parse_annotations(write(tmp_path, NUMBERED_STYLE))
        assert [(a.start_s, a.end_s) for a in anns] == [(10, 30), (100, 164)]

    def test_multiple_file_blocks(self, tmp_path):
        anns = parse_annotations(write(tmp_path, ONE_SEIZURE + "\n" + NO_SEIZURE))
        assert len(anns) == 1

    def test_count_mismatch_is_consistency_error(self, tmp_path):
        text = """\
File Name: chb02_16.edf
Number of Seizures in File: 2
Seizure Start Time: 130 seconds
Seizure End Time: 212 seconds
"""
        with pytest.raises(AnnotationError, match="declares 2"):
            parse_annotations(write(tmp_path, text))

    def test_start_after_end_rejected(self, tmp_path):
        text = """\
File Name: chb03_01.edf
Number of Seizures in File: 1
Seizure Start Time: 400 seconds
Seizure End Time: 360 seconds
"""
        with pytest.raises(AnnotationError, match="nonpositive length"):
            parse_annotations(write(tmp_path, text))

    def test_unpaired_times_rejected(self, tmp_path):
        text = """\
File Name: chb03_02.edf
Number of Seizures in File: 1
Seizure Start Time: 400 seconds
"""
        with pytest.raises(AnnotationError):
            parse_annotations(write(tmp_path, text))

    def test_no_interval_has_nonpositive_length(self, tmp_path):
        anns = parse_annotations(write(tmp_path, ONE_SEIZURE + NUMBERED_STYLE))
        assert all(a.end_s > a.start_s for a in anns)
