"""
Potsdam-style patch manifest.

Files are grouped by patch id, parsed from names such as
``top_potsdam_2_10_RGBIR`` or ``dsm_potsdam_07_08``. Everything after the first
dot of a file name is treated as the extension, so converted files like
``top_potsdam_2_10_RGBIR.ir.pgm`` belong to the same modality as their
``.ppm`` sibling.
"""

import json
import logging
import os
import re
from dataclasses import dataclass, field
from functools import total_ordering
from pathlib import Path

from treesegnet.exceptions import DataError, FormatError

logger = logging.getLogger(__name__)

RGB = 'RGB'
IRRG = 'IRRG'
RGBIR = 'RGBIR'
DSM = 'DSM'
GT = 'GT'
MODALITIES = (RGBIR, IRRG, RGB, DSM, GT)

_TOP_PATTERN = re.compile(r'^top_potsdam_(\d+)_(\d+)_(RGB|IRRG|RGBIR|label)$')
_DSM_PATTERN = re.compile(r'^dsm_potsdam_(\d{2})_(\d{2})$')

# Sidecar files that share a patch stem but carry no raster data.
IGNORED_EXTENSIONS = frozenset({'tfw', 'aux.xml', 'json'})


@total_ordering
@dataclass(frozen=True)
class PatchId:
    row: int
    col: int

    def __post_init__(self):
        if self.row < 1 or self.col < 1:
            raise DataError(f'Patch id ({self.row}, {self.col}) must be >= 1', code='patch_id')

    def __lt__(self, other):
        return (self.row, self.col) < (other.row, other.col)

    def __str__(self):
        return f'{self.row}_{self.col}'

    @classmethod
    def parse(cls, text):
        match = re.fullmatch(r'(\d+)_(\d+)', text.strip())
        if not match:
            raise FormatError(f"Patch id '{text}' is not of the form R_C")
        return cls(int(match.group(1)), int(match.group(2)))


DEFAULT_EXCLUDED = frozenset({PatchId(7, 10)})
VALIDATION_PATCHES = (PatchId(7, 7), PatchId(7, 8), PatchId(7, 9), PatchId(7, 11), PatchId(7, 12))


def _split_name(filename):
    name = Path(filename).name
    stem, _, extension = name.partition('.')
    return stem, extension


def parse_patch_name(filename):
    """Return (PatchId, modality) for a Potsdam file name."""
    stem, _ = _split_name(filename)
    match = _TOP_PATTERN.match(stem)
    if match:
        modality = GT if match.group(3) == 'label' else match.group(3)
        return PatchId(int(match.group(1)), int(match.group(2))), modality
    match = _DSM_PATTERN.match(stem)
    if match:
        return PatchId(int(match.group(1)), int(match.group(2))), DSM
    raise FormatError(f"Unrecognized patch file name '{filename}'")


@dataclass
class PatchRecord:
    """One patch and the files found for each of its modalities."""

    id: PatchId
    paths: dict = field(default_factory=dict)
    excluded: bool = False

    @property
    def modalities(self):
        return frozenset(self.paths)

    @property
    def labeled(self):
        return GT in self.paths

    @property
    def complete(self):
        has_optical = RGBIR in self.paths or (RGB in self.paths and IRRG in self.paths)
        return DSM in self.paths and has_optical

    @property
    def usable(self):
        return self.complete and not self.excluded

    def to_dict(self):
        return {
            'id': str(self.id),
            'paths': {modality: list(self.paths[modality]) for modality in MODALITIES if modality in self.paths},
            'labeled': self.labeled,
            'complete': self.complete,
            'excluded': self.excluded,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            PatchId.parse(data['id']),
            {modality: tuple(paths) for modality, paths in data.get('paths', {}).items()},
            bool(data.get('excluded', False)),
        )


@dataclass
class Manifest:
    records: tuple = ()
    skipped: tuple = ()

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, patch_id):
        for record in self.records:
            if record.id == patch_id:
                return record
        return None

    def with_gt(self):
        return [record for record in self.records if record.labeled]

    def labeled(self):
        """Labeled records that are complete and not excluded."""
        return [record for record in self.records if record.labeled and record.usable]

    def incomplete(self):
        return [record for record in self.records if not record.complete]

    def to_dict(self):
        return {
            'records': [record.to_dict() for record in self.records],
            'skipped': list(self.skipped),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def save(self, path):
        Path(path).write_text(self.to_json() + '\n')

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple(PatchRecord.from_dict(item) for item in data.get('records', [])),
            tuple(data.get('skipped', [])),
        )

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f'Manifest {path} is not valid JSON: {exc.msg}', position=f'line {exc.lineno}')
        return cls.from_dict(data)


def build_manifest(listing, exclude=DEFAULT_EXCLUDED):
    """Group file names by patch; unknown names are skipped, not fatal."""
    grouped = {}
    skipped = []
    for filename in listing:
        _, extension = _split_name(filename)
        if extension in IGNORED_EXTENSIONS:
            continue
        try:
            patch_id, modality = parse_patch_name(filename)
        except FormatError:
            skipped.append(str(filename))
            continue
        record = grouped.setdefault(patch_id, PatchRecord(patch_id, excluded=patch_id in exclude))
        record.paths[modality] = tuple(sorted((*record.paths.get(modality, ()), str(filename))))

    records = tuple(grouped[patch_id] for patch_id in sorted(grouped))
    for record in records:
        if record.excluded:
            logger.info('Patch %s excluded from experiments', record.id)
        elif not record.complete:
            logger.warning('Patch %s is incomplete: has %s', record.id, sorted(record.modalities))
    if skipped:
        logger.info('Skipped %d unrecognized files', len(skipped))
    return Manifest(records, tuple(skipped))


def scan_directory(directory):
    """Manifest over the files of one directory (non-recursive)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f'Data directory {directory} does not exist', code='missing_directory')
    return build_manifest(sorted(entry for entry in os.listdir(directory) if (directory / entry).is_file()))


def split_train_val(manifest, val_ids=VALIDATION_PATCHES):
    """Split usable labeled records into (train, val) by patch id."""
    labeled = {record.id: record for record in manifest.labeled()}
    missing = [patch_id for patch_id in val_ids if patch_id not in labeled]
    if missing:
        names = ', '.join(str(patch_id) for patch_id in missing)
        raise DataError(f'Validation patch {names} is not in the labeled manifest', code='missing_patch')
    val_set = set(val_ids)
    train = [record for patch_id, record in sorted(labeled.items()) if patch_id not in val_set]
    val = [labeled[patch_id] for patch_id in val_ids]
    return train, val
