"""
AWS S3 exporter
"""
import logging
import os
from typing import Any, Dict, Optional

from .base import ArtifactExporter
from ..exceptions import ExportError

BUCKET_ERRORS = {'403': 'access denied', '404': 'no such bucket'}


class S3Exporter(ArtifactExporter):
    """
    Upload artifacts to AWS S3

    Example:
        exporter = S3Exporter(bucket='pwca-runs', prefix='bench/')
        url = exporter.export('bench.csv', {'seed': 7})
    """

    def __init__(self, bucket: str, prefix: str = '', region: Optional[str] = None,
                 storage_class: str = 'STANDARD', logger: Optional[logging.Logger] = None):
        """
        Args:
            bucket: S3 bucket name
            prefix: Key prefix (folder path in S3)
            region: AWS region (uses default if None)
            storage_class: S3 storage class
            logger: Optional logger
        """
        self.bucket = bucket
        self.prefix = prefix.rstrip('/') + '/' if prefix else ''
        self.region = region
        self.storage_class = storage_class
        self.logger = logger or logging.getLogger(__name__)

    def key_for(self, artifact_path: str) -> str:
        return f"{self.prefix}{os.path.basename(artifact_path)}"

    def url_for(self, key: str) -> str:
        if self.region:
            return f"https://{self.bucket}.s3.{self.region}.amazonaws.com/{key}"
        return f"https://{self.bucket}.s3.amazonaws.com/{key}"

    def export(self, artifact_path: str, metadata: Optional[Dict[str, Any]] = None) -> str:
        """Upload an artifact to S3"""
        try:
            import boto3
            from botocore.exceptions import ClientError, NoCredentialsError
        except ImportError:
            raise ExportError("boto3 is not installed. Install with: pip install pwca-milp[s3]")

        try:
            s3_client = boto3.client('s3', region_name=self.region)
            key = self.key_for(artifact_path)
            extra_args: Dict[str, Any] = {'StorageClass': self.storage_class}
            if metadata:
                # S3 metadata must be strings
                extra_args['Metadata'] = {k: str(v) for k, v in metadata.items()}

            self.logger.info(f"Uploading to S3: s3://{self.bucket}/{key}")
            s3_client.upload_file(artifact_path, self.bucket, key, ExtraArgs=extra_args)
            url = self.url_for(key)
            self.logger.info(f"Upload successful: {url}")
            return url

        except NoCredentialsError:
            raise ExportError("AWS credentials not found. Configure AWS credentials first.")
        except ClientError as e:
            raise ExportError(f"S3 client error: {e}")
        except Exception as e:
            raise ExportError(f"Failed to export to S3: {e}")

    def validate_config(self) -> bool:
        """True when the bucket answers a HEAD request"""
        try:
            import boto3
            from botocore.exceptions import ClientError, NoCredentialsError
        except ImportError:
            self.logger.error("boto3 not installed")
            return False

        try:
            boto3.client('s3', region_name=self.region).head_bucket(Bucket=self.bucket)
        except NoCredentialsError:
            self.logger.error("AWS credentials not configured")
            return False
        except ClientError as e:
            code = e.response.get('Error', {}).get('Code', '')
            reason = BUCKET_ERRORS.get(code, f"S3 error {code or e}")
            self.logger.error(f"Bucket {self.bucket} unusable: {reason}")
            return False
        return True

    def __str__(self):
        return f"S3Exporter(bucket={self.bucket}, prefix={self.prefix})"
