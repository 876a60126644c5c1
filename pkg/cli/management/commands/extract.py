import logging
from pathlib import Path
from cli.helpers import MouseTrustCommand, frames_by_user, read_traces
from features.helpers import export_frame_csv
from windows.helpers import DEFAULT_WINDOW, export_labeled_csv, label_windows, make_user_windows

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Turn event files into 9-feature frames; with --target also write the labeled, flattened windows.'

    def add_arguments(self, parser):
        parser.add_argument('events', nargs='+', help='Event files or directories of event files')
        parser.add_argument('--output', required=True, help='Directory for the feature CSVs')
        parser.add_argument('--target', help='Target user for the labeled window export')
        parser.add_argument('--window', type=int, default=DEFAULT_WINDOW)
        parser.add_argument('--stride', type=int, default=DEFAULT_WINDOW)

    def run(self, *args, **options):
        output = Path(options['output'])
        frames = frames_by_user(read_traces(options['events']))

        # Step 1: one feature CSV per session
        count = 0
        for user_frames in frames.values():
            for frame in user_frames:
                export_frame_csv(frame, output / f'{frame.user_session_id}.features.csv')
                count += 1

        # Step 2: optional labeled windows
        if options['target']:
            labeled = label_windows(make_user_windows(frames, options['window'], options['stride']), options['target'])
            export_labeled_csv(labeled, output / f'windows_target_{options["target"]}.csv')
            self.stdout.write(f'windows for target {options["target"]}: {labeled.class_counts()}')

        self.stdout.write(f'wrote {count} feature frames to {output}')
