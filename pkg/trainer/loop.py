"""
The structure iteration: train, evaluate, rebuild the class tree, repeat.

Pass 0 trains the network without a Tree-CNN block. Every later pass folds
the previous pass's validation confusion, cuts a new class tree from it,
moves the segmentation weights into a network built around that tree and
trains again. The loop stops once the tree cut from the latest confusion is
the tree that produced it, or when the pass limit is reached.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from geometry.tiles import StitchAccumulator, extract_tile, gaussian_weight_map, plan_tiles
from metrics.confusion import ConfusionMatrix, confusion_from_maps, fold_lower_triangular
from metrics.scores import score
from network.model import build_network, carry_over, predict, prepare_input
from nn import functional as F
from nn.optim import SGD
from treecut.cutting import tree_cutting
from treecut.graph import graph_from_fold
from treecut.tree import parse_tree, serialize_tree, tree_equals
from treesegnet.exceptions import DataError

from .schedule import lr_at

logger = logging.getLogger(__name__)


@dataclass
class TrainStats:
    steps: int
    losses: tuple


@dataclass
class PassRecord:
    """Outcome of one structure pass. ``tree`` is None for pass 0."""

    index: int
    tree: object
    confusion: ConfusionMatrix
    report: object
    checkpoint: str = ''
    losses: tuple = ()

    @property
    def tree_text(self):
        return serialize_tree(self.tree) if self.tree is not None else ''

    def to_dict(self):
        return {
            'index': self.index,
            'tree': self.tree_text or None,
            'confusion': self.confusion.counts.tolist(),
            'class_names': list(self.confusion.class_names),
            'oa': self.report.oa,
            'mean_f1': self.report.mean_f1,
            'losses': list(self.losses),
            'checkpoint': self.checkpoint,
        }

    @classmethod
    def from_dict(cls, data):
        confusion = ConfusionMatrix(np.array(data['confusion'], dtype=np.int64), tuple(data['class_names']))
        tree = parse_tree(data['tree']) if data.get('tree') else None
        return cls(
            index=int(data['index']),
            tree=tree,
            confusion=confusion,
            report=score(confusion),
            checkpoint=data.get('checkpoint', ''),
            losses=tuple(data.get('losses', ())),
        )


@dataclass
class IterationResult:
    records: list
    converged: bool
    network: object = field(repr=False, default=None)

    @property
    def final_tree(self):
        return self.records[-1].tree if self.records else None


def resolve_workers(workers):
    return workers or os.cpu_count() or 1


def next_tree(confusion):
    """Class tree cut from a validation confusion matrix."""
    return tree_cutting(graph_from_fold(fold_lower_triangular(confusion)))


def train_pass(network, data, config, pass_index=0):
    """Run ``config.epochs`` epochs of minibatch SGD with momentum over the training tiles.

    Momentum and the learning-rate schedule start afresh every pass; the
    data order of each epoch comes from a generator seeded with the run
    seed, the pass index and the epoch.
    """
    count = data.num_train
    if not count:
        raise DataError('No training tiles', code='empty_split')
    batch = config.batch_size
    steps_per_epoch = math.ceil(count / batch)
    total = config.epochs * steps_per_epoch
    optimizer = SGD(network.parameters(), config.learning_rate, config.momentum)
    optimizer.reset()
    dsm_scale = network.spec.dsm_scale
    network.train()

    step = 0
    losses = []
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, pass_index, epoch]).permutation(count)
        total_loss = 0.0
        for start in range(0, count, batch):
            index = order[start:start + batch]
            optimizer.lr = lr_at(step, total, config.learning_rate)
            optimizer.zero_grad()
            x = prepare_input(data.train_images[index], dsm_scale)
            loss, dlogits = F.softmax_ce_loss(network.forward(x), data.train_labels[index])
            network.backward(dlogits)
            optimizer.step()
            total_loss += float(loss) * len(index)
            step += 1
        losses.append(total_loss / count)
        logger.info(
            'Pass %d epoch %d/%d: loss %.4f (lr %g)', pass_index, epoch + 1, config.epochs, losses[-1], optimizer.lr
        )
    return TrainStats(step, tuple(losses))


def predict_scene(network, image, config, workers=None):
    """Tiled prediction over a whole scene; returns (labels, stitched scores).

    Tiles are grouped into fixed batches in plan order. With several workers
    each one runs its own copy of the network over every n-th batch; the
    stitcher folds tiles in plan order whatever order they finish in.
    """
    image = np.asarray(image)
    height, width = image.shape[1:]
    plan = plan_tiles(height, width, config.tile, config.margin)
    weight = gaussian_weight_map(config.tile, config.sigma)
    accumulator = StitchAccumulator(plan, weight, channels=network.spec.num_classes)
    batches = [
        list(range(start, min(start + config.batch_size, len(plan))))
        for start in range(0, len(plan), config.batch_size)
    ]
    dsm_scale = network.spec.dsm_scale

    def run(model, assigned):
        results = []
        for indices in assigned:
            tiles = np.stack([extract_tile(image, plan, index) for index in indices])
            _, scores = predict(model, prepare_input(tiles, dsm_scale))
            results.append((indices, scores))
        return results

    def fold(results):
        for indices, scores in results:
            for index, tile_scores in zip(indices, scores):
                accumulator.add(index, tile_scores)

    workers = min(resolve_workers(config.workers if workers is None else workers), len(batches))
    if workers == 1:
        fold(run(network, batches))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run, network.clone(), batches[w::workers]) for w in range(workers)]
            for future in as_completed(futures):
                fold(future.result())

    stitched = accumulator.result()
    labels = (np.argmax(stitched, axis=0) + 1).astype(np.uint8)
    return labels, stitched


def evaluate_pass(network, val_scenes, config, workers=None):
    """Validation confusion and scores; also returns the predicted label maps."""
    if not val_scenes:
        raise DataError('No validation scenes', code='empty_split')
    num_classes = network.spec.num_classes
    confusion = ConfusionMatrix.zeros(num_classes)
    predictions = []
    for image, reference in val_scenes:
        labels, _ = predict_scene(network, image, config, workers)
        confusion = confusion.merge(confusion_from_maps(reference, labels, num_classes))
        predictions.append(labels)
    report = score(confusion)
    logger.info('Validation OA %.4f, mean F1 %.4f over %d pixels', report.oa, report.mean_f1, confusion.total)
    return confusion, report, predictions


def run_structure_iteration(config, data, run_dir=None, on_pass=None, resume=None):
    """Iterate structure passes until the class tree stops changing.

    ``resume`` is a ``(network, records)`` pair from a saved pass; the run
    continues with the pass after the last record. ``on_pass`` is called
    with every new PassRecord once it is saved.
    """
    base_spec = config.network.with_tree(None)
    if resume is not None:
        network, records = resume[0], list(resume[1])
        logger.info('Resuming after pass %d', records[-1].index)
    else:
        network, records = None, []
    if run_dir is not None:
        run_dir.write_config(config)

    converged = False
    while True:
        pass_index = len(records)
        if records:
            tree = next_tree(records[-1].confusion)
            if records[-1].tree is not None and tree_equals(tree, records[-1].tree):
                converged = True
                logger.info('Tree %s is a fixpoint after pass %d', serialize_tree(tree), records[-1].index)
                break
            if pass_index >= config.max_passes:
                logger.warning('Stopping after %d passes without a stable tree', pass_index)
                break
            network = carry_over(network, build_network(base_spec.with_tree(tree), config.seed))
            logger.info('Pass %d uses tree %s', pass_index, serialize_tree(tree))
        else:
            tree = None
            network = build_network(base_spec, config.seed)

        stats = train_pass(network, data, config, pass_index)
        confusion, report, predictions = evaluate_pass(network, data.val_scenes, config)
        record = PassRecord(pass_index, tree, confusion, report, losses=stats.losses)
        records.append(record)
        if run_dir is not None:
            run_dir.write_pass(record, network, config, records, predictions, data.val_scenes)
            run_dir.write_transcript(records, converged=False)
        if on_pass is not None:
            on_pass(record)

    if run_dir is not None:
        run_dir.write_transcript(records, converged)
    return IterationResult(records, converged, network)
